use std::fmt;

use super::TraceError;
use crate::model::{Guideword, Id, ModelBundle};

/// One cause in a matrix cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellEntry {
    pub hazard: Id,
    pub qualified: bool,
}

impl fmt::Display for CellEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.qualified {
            write!(f, "({})", self.hazard)
        } else {
            write!(f, "{}", self.hazard)
        }
    }
}

/// Hazardous control actions of one control action: rows are its levels,
/// columns the four guidewords.
#[derive(Debug, Clone, PartialEq)]
pub struct HcaTable {
    pub action: String,
    pub levels: Vec<String>,
    /// `cells[row][guideword]`, entries in registration order.
    pub cells: Vec<[Vec<CellEntry>; 4]>,
    /// HCA ids per row, in registration order.
    pub labels: Vec<Vec<Id>>,
}

fn column(g: Guideword) -> usize {
    Guideword::ALL.iter().position(|&x| x == g).expect("guideword listed in ALL")
}

pub fn hca_table(bundle: &ModelBundle, action: &str) -> Result<HcaTable, TraceError> {
    let def = bundle
        .action(action)
        .ok_or_else(|| TraceError::UnknownAction(action.to_owned()))?;
    let levels = def.levels.clone();
    let mut cells = vec![<[Vec<CellEntry>; 4]>::default(); levels.len()];
    let mut labels = vec![Vec::new(); levels.len()];
    for h in bundle.hcas().iter().filter(|h| h.action == action) {
        let Some(row) = levels.iter().position(|l| *l == h.level) else {
            continue;
        };
        cells[row][column(h.guideword)].push(CellEntry {
            hazard: h.causes.clone(),
            qualified: h.qualified,
        });
        labels[row].push(h.id.clone());
    }
    Ok(HcaTable {
        action: action.to_owned(),
        levels,
        cells,
        labels,
    })
}

/// `max_injection` -> `Max injection`.
pub fn level_label(level: &str) -> String {
    let spaced = level.replace('_', " ");
    let mut chars = spaced.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

impl HcaTable {
    pub fn cell(&self, level: &str, guideword: Guideword) -> Option<&[CellEntry]> {
        let row = self.levels.iter().position(|l| l == level)?;
        Some(&self.cells[row][column(guideword)])
    }

    /// Number of cause entries over all cells.
    pub fn population(&self) -> usize {
        self.cells.iter().flatten().map(Vec::len).sum()
    }

    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::with_capacity(self.levels.len() + 1);
        let mut header = vec!["Control".to_owned()];
        header.extend(Guideword::ALL.iter().map(|g| g.label().to_owned()));
        header.push("Label".to_owned());
        rows.push(header);
        for (i, level) in self.levels.iter().enumerate() {
            let mut row = vec![level_label(level)];
            for cell in &self.cells[i] {
                row.push(cell.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
            }
            row.push(self.labels[i].iter().map(Id::as_str).collect::<Vec<_>>().join(", "));
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();

        let mut out = String::from("Control signal hazardous when applied:\n");
        for (n, row) in rows.iter().enumerate() {
            let mut line = String::new();
            for (c, text) in row.iter().enumerate() {
                line.push_str(&format!("{text:<w$}  ", w = widths[c]));
            }
            out.push_str(line.trim_end());
            out.push('\n');
            if n == 0 {
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}
