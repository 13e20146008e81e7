use std::collections::BTreeSet;
use std::fmt::Write as _;

use stereosmell::dataset::{read_records_csv, FineGrainedRecord};
use stereosmell::mining::{
    agglomerate, apriori, binarize_records, popc, presence_by_group, rules, write_clusters_csv, write_rules_csv,
    BinaryMatrix, Distance, Linkage, MiningError,
};
use stereosmell::roles::StereotypeLabel;
use stereosmell::smells::Smell;

use super::{data_err, to_bytes};
use crate::workspace::{Comment, Workspace, MINING, RECORDS};
use crate::{stage_seed, CliError, Config};

fn rel(name: &str) -> String {
    format!("{MINING}/{name}")
}

fn write_rules(ws: &Workspace, name: &str, tx: &[BTreeSet<String>], min_support: f64, filter: Option<&BTreeSet<String>>) -> Result<usize, CliError> {
    let found = match apriori(tx, min_support).and_then(|sets| rules(&sets, filter)) {
        Ok(found) => found,
        Err(MiningError::EmptyTransactions) => Vec::new(),
        Err(e) => return Err(data_err(e)),
    };
    ws.write(&rel(name), Comment::Hash, &to_bytes(|buf| write_rules_csv(buf, &found))?)?;
    Ok(found.len())
}

fn write_tree(ws: &Workspace, stem: &str, title: &str, m: &BinaryMatrix) -> Result<String, CliError> {
    match agglomerate(m, Distance::Jaccard, Linkage::Average) {
        Ok(tree) => {
            ws.write_json(&rel(&format!("{stem}.json")), &tree)?;
            ws.write(&rel(&format!("{stem}.nwk")), Comment::Bracket, format!("{}\n", tree.to_newick()).as_bytes())?;
            ws.write(&rel(&format!("{stem}.svg")), Comment::Xml, tree.to_svg(title).as_bytes())?;
            Ok(format!("{} leaves, height {:.4}", m.n_rows(), tree.height()))
        }
        Err(e) => {
            ws.write(&rel(&format!("{stem}.nwk")), Comment::Bracket, format!("skipped: {e}\n").as_bytes())?;
            Ok(format!("skipped: {e}"))
        }
    }
}

/// Clusters one group of smelly classes and derives its dendrograms and
/// stereotype rules. Returns the summary lines.
fn mine_group(ws: &Workspace, group: &str, records: &[&FineGrainedRecord], seed: u64, theta: f64, min_support: f64) -> Result<String, CliError> {
    let mut summary = format!("[{group}]\nclasses: {}\n", records.len());
    let owned: Vec<FineGrainedRecord> = records.iter().map(|r| (*r).clone()).collect();
    let matrix = binarize_records(&owned).map_err(data_err)?;
    let assignment = match popc(&matrix, stage_seed(seed, &format!("mine/{group}")), theta) {
        Ok(a) => a,
        Err(e) => {
            ws.write(&rel(&format!("clusters_{group}.csv")), Comment::Hash, format!("skipped: {e}\n").as_bytes())?;
            writeln!(summary, "clustering: skipped: {e}").unwrap();
            return Ok(summary);
        }
    };
    ws.write(&rel(&format!("clusters_{group}.csv")), Comment::Hash, &to_bytes(|buf| write_clusters_csv(buf, &matrix, &assignment))?)?;
    writeln!(summary, "clusters: {}\nscore: {:.6}\nsweeps: {}", assignment.cluster_count, assignment.score, assignment.iterations).unwrap();

    let smells_of: Vec<Vec<String>> = records.iter().map(|r| r.smells().map(|s| s.to_string()).collect()).collect();
    let smells: Vec<String> = Smell::ALL.iter().map(|s| s.to_string()).filter(|s| smells_of.iter().any(|v| v.contains(s))).collect();
    let by_smell = presence_by_group(&assignment, &smells_of, &smells);
    let line = write_tree(ws, &format!("dendrogram_smells_{group}"), &format!("Smells ({group})"), &by_smell)?;
    writeln!(summary, "smell dendrogram: {line}").unwrap();

    let labels_of: Vec<Vec<String>> = records.iter().map(|r| vec![r.label.display_name().to_string()]).collect();
    let labels: Vec<String> = StereotypeLabel::ALL
        .iter()
        .map(|l| l.display_name().to_string())
        .filter(|l| labels_of.iter().any(|v| &v[0] == l))
        .collect();
    let by_label = presence_by_group(&assignment, &labels_of, &labels);
    let line = write_tree(ws, &format!("dendrogram_stereotypes_{group}"), &format!("Stereotypes ({group})"), &by_label)?;
    writeln!(summary, "stereotype dendrogram: {line}").unwrap();

    let tx: Vec<BTreeSet<String>> = (0..assignment.cluster_count)
        .map(|k| assignment.members(k).iter().map(|&i| records[i].label.abbreviation().to_string()).collect())
        .collect();
    let n = write_rules(ws, &format!("rules_stereotypes_{group}.csv"), &tx, min_support, None)?;
    writeln!(summary, "stereotype rules: {n}").unwrap();
    Ok(summary)
}

pub fn run(ws: &Workspace, config: &Config) -> Result<(), CliError> {
    let seed = config.require_seed("mine")?;
    let (theta, min_support) = (config.theta(), config.min_support());
    let records = read_records_csv(ws.read(RECORDS, "integrate")?.as_bytes()).map_err(data_err)?;
    let smelly: Vec<&FineGrainedRecord> = records.iter().filter(|r| r.is_smelly()).collect();
    ws.remove_dir(MINING)?;

    let mut summary = format!("smelly classes: {}\ntheta: {theta}\nmin support: {min_support}\n\n", smelly.len());
    let mut groups: Vec<String> = smelly.iter().map(|r| r.kind.map_or("all", |k| k.name()).to_string()).collect();
    groups.sort();
    groups.dedup();
    for g in &groups {
        let members: Vec<&FineGrainedRecord> =
            smelly.iter().copied().filter(|r| r.kind.map_or("all", |k| k.name()) == g).collect();
        summary.push_str(&mine_group(ws, g, &members, seed, theta, min_support)?);
        summary.push('\n');
    }

    let smell_tx: Vec<BTreeSet<String>> = smelly.iter().map(|r| r.smells().map(|s| s.to_string()).collect()).collect();
    let n = write_rules(ws, "rules_smells.csv", &smell_tx, min_support, None)?;
    writeln!(summary, "smell rules: {n}").unwrap();

    let mixed: Vec<BTreeSet<String>> = smelly
        .iter()
        .zip(&smell_tx)
        .map(|(r, s)| {
            let mut t = s.clone();
            t.insert(r.label.display_name().to_string());
            t
        })
        .collect();
    let consequents: BTreeSet<String> = StereotypeLabel::ALL.iter().map(|l| l.display_name().to_string()).collect();
    let n = write_rules(ws, "rules_smell_stereotype.csv", &mixed, min_support, Some(&consequents))?;
    writeln!(summary, "smell to stereotype rules: {n}").unwrap();

    ws.write(&rel("summary.txt"), Comment::Hash, summary.as_bytes())
}
