use std::collections::BTreeMap;
use std::fmt::Write as _;

use stereosmell::analytics::{
    presence_matrix, smell_by_stereotype, smell_density, smell_share_by_stereotype, spearman_matrix,
    stereotype_percentages, svg, welch_ttest, write_density_csv, write_percentages_csv, write_presence_csv,
    write_shares_csv, write_smell_by_stereotype_csv, write_spearman_csv, DensityReport, TABLE_ORDER,
};
use stereosmell::dataset::{read_records_csv, FineGrainedRecord, ProjectKind};
use stereosmell::smells::Smell;

use super::{data_err, manifest_of, read_projects, to_bytes};
use crate::workspace::{Comment, Workspace, PROJECTS, RECORDS, REPORTS};
use crate::{CliError, Config};

fn rel(name: &str) -> String {
    format!("{REPORTS}/{name}")
}

fn density(ws: &Workspace, records: &[FineGrainedRecord]) -> Result<DensityReport, String> {
    if !ws.exists(PROJECTS) {
        return Err("no projects.csv; densities need scanned line counts".into());
    }
    let projects = read_projects(ws).map_err(|e| e.to_string())?;
    let loc: BTreeMap<String, u64> = projects.iter().map(|p| (p.name.clone(), p.loc)).collect();
    smell_density(records, &manifest_of(&projects), &loc).map_err(|e| e.to_string())
}

fn welch_text(report: &DensityReport) -> String {
    let desktop = report.densities(ProjectKind::Desktop);
    let mobile = report.densities(ProjectKind::Mobile);
    if desktop.is_empty() || mobile.is_empty() {
        return "skipped: Welch's t-test needs both desktop and mobile projects\n".into();
    }
    match welch_ttest(&desktop, &mobile) {
        Ok(w) => format!(
            "desktop n={} mean={:.4}\nmobile n={} mean={:.4}\nt={:.6}\ndf={:.6}\np={:.6}\n",
            desktop.len(),
            desktop.iter().sum::<f64>() / desktop.len() as f64,
            mobile.len(),
            mobile.iter().sum::<f64>() / mobile.len() as f64,
            w.t,
            w.df,
            w.p
        ),
        Err(e) => format!("skipped: {e}\n"),
    }
}

pub fn run(ws: &Workspace, config: &Config) -> Result<(), CliError> {
    let records = read_records_csv(ws.read(RECORDS, "integrate")?.as_bytes()).map_err(data_err)?;
    ws.remove_dir(REPORTS)?;
    let svg_on = config.svg();

    match density(ws, &records) {
        Ok(report) => {
            ws.write(&rel("density.csv"), Comment::Hash, &to_bytes(|buf| write_density_csv(buf, &report))?)?;
            ws.write(&rel("welch.txt"), Comment::Hash, welch_text(&report).as_bytes())?;
            if svg_on {
                let bars: Vec<_> = report.rows.iter().map(|r| (r.project.clone(), r.density)).collect();
                ws.write(&rel("density.svg"), Comment::Xml, svg::bar_chart("Smells per KLOC", &bars).as_bytes())?;
            }
        }
        Err(reason) => {
            let note = format!("skipped: {reason}\n");
            ws.write(&rel("density.csv"), Comment::Hash, note.as_bytes())?;
            ws.write(&rel("welch.txt"), Comment::Hash, note.as_bytes())?;
        }
    }

    let counts: Vec<[u32; 18]> = records.iter().map(|r| r.counts).collect();
    match spearman_matrix(&counts) {
        Ok(m) => {
            ws.write(&rel("spearman.csv"), Comment::Hash, &to_bytes(|buf| write_spearman_csv(buf, &m))?)?;
            let mut text = String::new();
            match m.max_pair() {
                Some((a, b, rho)) => writeln!(text, "strongest pair: {a} / {b} rho={rho:.6}").unwrap(),
                None => text.push_str("strongest pair: none\n"),
            }
            let constant: Vec<_> = Smell::ALL.iter().filter(|s| m.constant[s.index()]).map(|s| s.to_string()).collect();
            writeln!(text, "constant columns: {}", if constant.is_empty() { "none".into() } else { constant.join(", ") })
                .unwrap();
            ws.write(&rel("correlation.txt"), Comment::Hash, text.as_bytes())?;
            if svg_on {
                let labels: Vec<String> = Smell::ALL.iter().map(|s| s.to_string()).collect();
                let values: Vec<Vec<f64>> = m.values.iter().map(|r| r.to_vec()).collect();
                ws.write(&rel("spearman.svg"), Comment::Xml, svg::heatmap("Spearman correlation", &labels, &values).as_bytes())?;
            }
        }
        Err(e) => {
            let note = format!("skipped: {e}\n");
            ws.write(&rel("spearman.csv"), Comment::Hash, note.as_bytes())?;
            ws.write(&rel("correlation.txt"), Comment::Hash, note.as_bytes())?;
        }
    }

    let pct = stereotype_percentages(&records);
    ws.write(&rel("percentages.csv"), Comment::Hash, &to_bytes(|buf| write_percentages_csv(buf, &pct))?)?;

    match smell_share_by_stereotype(&records) {
        Ok(shares) => {
            ws.write(&rel("shares.csv"), Comment::Hash, &to_bytes(|buf| write_shares_csv(buf, &shares))?)?;
            if svg_on {
                let bars: Vec<_> = TABLE_ORDER.iter().map(|l| (l.display_name().to_string(), shares[l.index()])).collect();
                ws.write(&rel("shares.svg"), Comment::Xml, svg::bar_chart("Share of smells by stereotype", &bars).as_bytes())?;
            }
        }
        Err(e) => ws.write(&rel("shares.csv"), Comment::Hash, format!("skipped: {e}\n").as_bytes())?,
    }

    let freq = smell_by_stereotype(&records);
    ws.write(&rel("smell_by_stereotype.csv"), Comment::Hash, &to_bytes(|buf| write_smell_by_stereotype_csv(buf, &freq))?)?;
    let presence = presence_matrix(&records);
    ws.write(&rel("presence.csv"), Comment::Hash, &to_bytes(|buf| write_presence_csv(buf, &presence))?)
}
