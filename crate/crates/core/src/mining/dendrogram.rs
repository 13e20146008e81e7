use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BinaryMatrix, MiningError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DendrogramNode {
    Leaf { label: String },
    Merge { left: Box<DendrogramNode>, right: Box<DendrogramNode>, height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    Jaccard,
    Hamming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

/// `1 - |a ∩ b| / |a ∪ b|`; two empty rows are at distance 0.
pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

fn hamming(a: &[bool], b: &[bool]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64 / a.len() as f64
}

impl DendrogramNode {
    pub fn height(&self) -> f64 {
        match self {
            DendrogramNode::Leaf { .. } => 0.0,
            DendrogramNode::Merge { height, .. } => *height,
        }
    }

    pub fn leaves(&self) -> Vec<&str> {
        match self {
            DendrogramNode::Leaf { label } => vec![label],
            DendrogramNode::Merge { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    /// Newick text with branch lengths; labels needing it are quoted.
    pub fn to_newick(&self) -> String {
        fn label(s: &str) -> String {
            if s.chars().any(|c| "()[]':;, \t".contains(c)) {
                format!("'{}'", s.replace('\'', "''"))
            } else {
                s.to_string()
            }
        }
        fn walk(node: &DendrogramNode, parent: f64, out: &mut String) {
            match node {
                DendrogramNode::Leaf { label: l } => out.push_str(&label(l)),
                DendrogramNode::Merge { left, right, height } => {
                    out.push('(');
                    walk(left, *height, out);
                    out.push(',');
                    walk(right, *height, out);
                    out.push(')');
                }
            }
            let _ = write!(out, ":{}", parent - node.height());
        }
        let mut out = String::new();
        match self {
            DendrogramNode::Leaf { label: l } => out.push_str(&label(l)),
            DendrogramNode::Merge { left, right, height } => {
                out.push('(');
                walk(left, *height, &mut out);
                out.push(',');
                walk(right, *height, &mut out);
                out.push(')');
            }
        }
        out.push(';');
        out
    }

    /// Horizontal tree with leaves stacked top to bottom.
    pub fn to_svg(&self, title: &str) -> String {
        let leaves = self.leaves();
        let (row, left, width) = (22.0, 170.0, 360.0);
        let max_h = self.height().max(f64::MIN_POSITIVE);
        let x_of = |h: f64| left + width * h / max_h;
        let mut body = String::new();
        let mut next_leaf = 0usize;
        // returns the vertical position of the node
        fn draw(
            n: &DendrogramNode,
            next_leaf: &mut usize,
            row: f64,
            x_of: &dyn Fn(f64) -> f64,
            out: &mut String,
        ) -> f64 {
            match n {
                DendrogramNode::Leaf { label } => {
                    let y = 40.0 + *next_leaf as f64 * row;
                    *next_leaf += 1;
                    let esc = label.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
                    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{esc}</text>"#, x_of(0.0) - 6.0, y + 4.0);
                    y
                }
                DendrogramNode::Merge { left, right, height } => {
                    let (yl, yr) = (draw(left, next_leaf, row, x_of, out), draw(right, next_leaf, row, x_of, out));
                    let x = x_of(*height);
                    for (child, y) in [(left, yl), (right, yr)] {
                        let _ = writeln!(
                            out,
                            r#"<line x1="{:.1}" y1="{y:.1}" x2="{x:.1}" y2="{y:.1}" stroke="black"/>"#,
                            x_of(child.height())
                        );
                    }
                    let _ = writeln!(out, r#"<line x1="{x:.1}" y1="{yl:.1}" x2="{x:.1}" y2="{yr:.1}" stroke="black"/>"#);
                    (yl + yr) / 2.0
                }
            }
        }
        draw(self, &mut next_leaf, row, &x_of, &mut body);
        let height = 60.0 + leaves.len() as f64 * row;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"11\">\n<text x=\"10\" y=\"20\" font-size=\"14\">{}</text>\n{body}</svg>\n",
            left + width + 20.0,
            title.replace('&', "&amp;").replace('<', "&lt;")
        )
    }
}

/// Agglomerative clustering of the matrix rows.
///
/// Ties between equally close pairs go to the pair whose smallest leaf
/// labels sort first.
pub fn agglomerate(m: &BinaryMatrix, distance: Distance, linkage: Linkage) -> Result<DendrogramNode, MiningError> {
    let n = m.n_rows();
    if n < 2 {
        return Err(MiningError::TooFewRows);
    }
    let d = |a: usize, b: usize| match distance {
        Distance::Jaccard => jaccard(m.row(a), m.row(b)),
        Distance::Hamming => hamming(m.row(a), m.row(b)),
    };
    let point: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| d(a, b)).collect()).collect();

    struct Cluster {
        node: DendrogramNode,
        members: Vec<usize>,
        key: String,
    }
    let mut active: Vec<Cluster> = (0..n)
        .map(|i| Cluster {
            node: DendrogramNode::Leaf { label: m.rows()[i].clone() },
            members: vec![i],
            key: m.rows()[i].clone(),
        })
        .collect();
    let link = |a: &[usize], b: &[usize]| -> f64 {
        let pairs = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y)));
        match linkage {
            Linkage::Single => pairs.map(|(x, y)| point[x][y]).fold(f64::INFINITY, f64::min),
            Linkage::Complete => pairs.map(|(x, y)| point[x][y]).fold(0.0, f64::max),
            Linkage::Average => pairs.map(|(x, y)| point[x][y]).sum::<f64>() / (a.len() * b.len()) as f64,
        }
    };
    let mut last_height = 0.0f64;
    while active.len() > 1 {
        let mut best: Option<(f64, (&str, &str), usize, usize)> = None;
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let h = link(&active[i].members, &active[j].members);
                let (ki, kj) = (active[i].key.as_str(), active[j].key.as_str());
                let pair = if ki <= kj { (ki, kj) } else { (kj, ki) };
                let better = match &best {
                    None => true,
                    Some((bh, bp, _, _)) => h < *bh || (h == *bh && pair < *bp),
                };
                if better {
                    best = Some((h, pair, i, j));
                }
            }
        }
        let (h, _, i, j) = best.expect("two clusters remain");
        // average linkage never decreases; clamp rounding noise
        let h = h.max(last_height);
        last_height = h;
        let right = active.remove(j);
        let left = active.remove(i);
        let (first, second) = if left.key <= right.key { (left, right) } else { (right, left) };
        let mut members = first.members;
        members.extend(second.members);
        active.push(Cluster {
            key: first.key,
            node: DendrogramNode::Merge { left: Box::new(first.node), right: Box::new(second.node), height: h },
            members,
        });
    }
    Ok(active.pop().expect("one cluster").node)
}
