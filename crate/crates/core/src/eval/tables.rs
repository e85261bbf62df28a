use std::fmt::Write;

use crate::neural::NetKind;

/// Renders an accuracy percentage: below 1 prints `<1`, otherwise up to
/// two decimals with trailing zeros dropped. Missing cells print `-`.
pub fn format_accuracy(value: Option<f64>) -> String {
    let Some(v) = value else {
        return "-".into();
    };
    if v < 1.0 {
        return "<1".into();
    }
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Which class of the pair the test rows came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Star {
    First,
    Second,
}

/// One row of the pairwise table: a pair net's accuracy on test rows of
/// the starred class, one cell per topology kind in `NetKind::ALL` order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub first: String,
    pub second: String,
    pub star: Star,
    pub cells: [Option<f64>; 4],
}

impl PairRow {
    pub fn label(&self) -> String {
        match self.star {
            Star::First => format!("{} * ,{}", self.first, self.second),
            Star::Second => format!("{} ,{} *", self.first, self.second),
        }
    }
}

fn kind_title(kind: NetKind) -> &'static str {
    match kind {
        NetKind::Cascade => "Cascade Net",
        NetKind::Feedforward => "Feed forward Net",
        NetKind::Fit => "Fit Net",
        NetKind::Pattern => "Pattern Net",
    }
}

/// Tab-separated pairwise table, one line per row.
pub fn render_pairwise_table(rows: &[PairRow]) -> String {
    let mut out = String::from("Signal Classes");
    for kind in NetKind::ALL {
        write!(out, "\t{}.", kind_title(kind)).unwrap();
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.label());
        for cell in row.cells {
            write!(out, "\t{}", format_accuracy(cell)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Per-class accuracies of the five-output baseline (`normal`) and the
/// pairwise ensemble (`proposed`) for each topology kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub class: String,
    pub normal: [Option<f64>; 4],
    pub proposed: [Option<f64>; 4],
}

/// Tab-separated comparison grid with Normal/Proposed sub-columns.
pub fn render_comparison_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("Signal Classes");
    for kind in NetKind::ALL {
        write!(out, "\t{}\t", kind_title(kind).replace("forward", "Forward")).unwrap();
    }
    out.push('\n');
    for _ in NetKind::ALL {
        out.push_str("\tNormal\tProposed");
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.class);
        for k in 0..NetKind::ALL.len() {
            write!(
                out,
                "\t{}\t{}",
                format_accuracy(row.normal[k]),
                format_accuracy(row.proposed[k])
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}
