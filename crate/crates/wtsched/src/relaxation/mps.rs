//! Free-format MPS writer and reader for the relaxed model.
//!
//! The writer emits rows in constraint order and columns in variable-id
//! order, so two builds of the same instance produce byte-identical text.
//! All model coefficients are integral and are printed without a fractional
//! part. The reader parses enough of general MPS (ROWS/COLUMNS/RHS/BOUNDS,
//! integrality markers) to round-trip the writer's output and to sanity-check
//! files before they are handed to an external solver.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{RelaxedModel, Sense, VarKind};

/// Parsed skeleton of an MPS file.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsSummary {
    pub name: String,
    pub objective_row: String,
    /// Constraint rows in file order, excluding the objective.
    pub rows: Vec<(String, char)>,
    /// `(column, row) -> coefficient`, including objective entries.
    pub coefficients: BTreeMap<(String, String), f64>,
    pub rhs: BTreeMap<String, f64>,
    pub integer_columns: Vec<String>,
    /// Columns that appeared in the COLUMNS section, in file order.
    pub columns: Vec<String>,
}

fn fmt_coef(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Serializes the model as free-format MPS text (minimization, objective row
/// `OBJ`, binaries declared through integrality markers and `BV` bounds).
pub fn export_model(model: &RelaxedModel) -> String {
    let mut out = String::new();
    out.push_str("NAME          WTSCHED_RELAXATION\nROWS\n N  OBJ\n");
    for row in &model.rows {
        let sense = match row.sense {
            Sense::Eq => 'E',
            Sense::Le => 'L',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {}  {}", sense, row.name);
    }

    // Column-major view: per variable, its (row, coefficient) entries in row
    // order, objective first.
    let mut per_var: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.vars.len()];
    for (var, coef) in &model.objective {
        per_var[*var].push((0, *coef));
    }
    for (r, row) in model.rows.iter().enumerate() {
        for (var, coef) in &row.coefs {
            per_var[*var].push((r + 1, *coef));
        }
    }

    out.push_str("COLUMNS\n");
    let row_name = |r: usize| -> &str {
        if r == 0 {
            "OBJ"
        } else {
            &model.rows[r - 1].name
        }
    };
    let mut in_integer_block = false;
    let mut marker_count = 0;
    for (var, entries) in per_var.iter().enumerate() {
        if entries.is_empty() {
            continue;
        }
        let is_int = model.vars.kind(var) == VarKind::Binary;
        if is_int != in_integer_block {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    MARKER{marker_count}  'MARKER'  {tag}");
            marker_count += 1;
            in_integer_block = is_int;
        }
        let name = model.vars.name(var);
        for pair in entries.chunks(2) {
            let mut line = format!("    {name}  {}  {}", row_name(pair[0].0), fmt_coef(pair[0].1));
            if let Some(second) = pair.get(1) {
                let _ = write!(line, "  {}  {}", row_name(second.0), fmt_coef(second.1));
            }
            out.push_str(&line);
            out.push('\n');
        }
    }
    if in_integer_block {
        let _ = writeln!(out, "    MARKER{marker_count}  'MARKER'  'INTEND'");
    }

    out.push_str("RHS\n");
    for row in &model.rows {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", row.name, fmt_coef(row.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (var, entries) in per_var.iter().enumerate() {
        if !entries.is_empty() && model.vars.kind(var) == VarKind::Binary {
            let _ = writeln!(out, " BV BND  {}", model.vars.name(var));
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Ranges,
    Done,
}

/// Parses free-format MPS text into an [`MpsSummary`].
pub fn parse_mps(text: &str) -> Result<MpsSummary> {
    let mut summary = MpsSummary {
        name: String::new(),
        objective_row: String::new(),
        rows: Vec::new(),
        coefficients: BTreeMap::new(),
        rhs: BTreeMap::new(),
        integer_columns: Vec::new(),
        columns: Vec::new(),
    };
    let mut section = Section::None;
    let mut integer_block = false;
    let mut seen_columns: BTreeMap<String, ()> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('*') {
            continue;
        }
        let starts_at_margin = !raw.starts_with(' ') && !raw.starts_with('\t');
        let fields: Vec<&str> = line.split_whitespace().collect();
        if starts_at_margin {
            match fields[0] {
                "NAME" => {
                    summary.name = fields.get(1).unwrap_or(&"").to_string();
                    continue;
                }
                "ROWS" => {
                    section = Section::Rows;
                    continue;
                }
                "COLUMNS" => {
                    section = Section::Columns;
                    continue;
                }
                "RHS" => {
                    section = Section::Rhs;
                    continue;
                }
                "BOUNDS" => {
                    section = Section::Bounds;
                    continue;
                }
                "RANGES" => {
                    section = Section::Ranges;
                    continue;
                }
                "ENDATA" => {
                    section = Section::Done;
                    continue;
                }
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown MPS section '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        match section {
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(Error::Parse(format!("line {}: malformed row entry", lineno + 1)));
                }
                let sense = fields[0]
                    .chars()
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: empty sense", lineno + 1)))?;
                match sense {
                    'N' => summary.objective_row = fields[1].to_string(),
                    'E' | 'L' | 'G' => summary.rows.push((fields[1].to_string(), sense)),
                    other => {
                        return Err(Error::Parse(format!(
                            "line {}: unknown row sense '{other}'",
                            lineno + 1
                        )))
                    }
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => integer_block = true,
                        "'INTEND'" => integer_block = false,
                        other => {
                            return Err(Error::Parse(format!(
                                "line {}: unknown marker '{other}'",
                                lineno + 1
                            )))
                        }
                    }
                    continue;
                }
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(Error::Parse(format!(
                        "line {}: malformed column entry",
                        lineno + 1
                    )));
                }
                let column = fields[0].to_string();
                if seen_columns.insert(column.clone(), ()).is_none() {
                    summary.columns.push(column.clone());
                    if integer_block {
                        summary.integer_columns.push(column.clone());
                    }
                }
                for pair in fields[1..].chunks(2) {
                    let value: f64 = pair[1].parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad coefficient '{}'", lineno + 1, pair[1]))
                    })?;
                    summary.coefficients.insert((column.clone(), pair[0].to_string()), value);
                }
            }
            Section::Rhs => {
                if fields.len() != 3 && fields.len() != 5 {
                    return Err(Error::Parse(format!("line {}: malformed RHS entry", lineno + 1)));
                }
                for pair in fields[1..].chunks(2) {
                    let value: f64 = pair[1].parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad rhs '{}'", lineno + 1, pair[1]))
                    })?;
                    summary.rhs.insert(pair[0].to_string(), value);
                }
            }
            Section::Bounds | Section::Ranges => {}
            Section::None | Section::Done => {
                return Err(Error::Parse(format!(
                    "line {}: data outside any MPS section",
                    lineno + 1
                )))
            }
        }
    }
    if section != Section::Done {
        return Err(Error::Parse("missing ENDATA".into()));
    }
    Ok(summary)
}
