//! MPS reading and a debug writer.
//!
//! Both fixed and free format are accepted: lines are tokenized on
//! whitespace, which covers fixed-format files whose names contain no
//! blanks. Supported sections: NAME, OBJSENSE, ROWS, COLUMNS (with
//! INTORG/INTEND markers), RHS, RANGES, BOUNDS, ENDATA.

use crate::mip::{MipError, MipInstance, Row, Sense};
use std::collections::HashMap;
use tracing::warn;

const INF: f64 = f64::INFINITY;

fn err(line: usize, msg: impl Into<String>) -> MipError {
    MipError::MalformedMps {
        line,
        msg: msg.into(),
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64, MipError> {
    tok.parse::<f64>()
        .map_err(|_| err(line, format!("expected a number, found {tok:?}")))
}

struct ColumnData {
    name: String,
    objective: f64,
    entries: Vec<(usize, f64)>, // row index -> coefficient
    integer: bool,
    lower: Option<f64>,
    upper: Option<f64>,
}

/// Parses an MPS document into a validated [`MipInstance`].
///
/// Maximize objectives (OBJSENSE MAX) are negated on load and flagged so
/// reported values can be un-flipped. Free rows beyond the objective are
/// ignored with a warning; RANGES entries expand into a second inequality.
pub fn parse_mps(text: &str) -> Result<MipInstance, MipError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Name,
        ObjSense,
        Rows,
        Columns,
        Rhs,
        Ranges,
        Bounds,
        Done,
    }

    let mut section = Section::None;
    let mut name = String::new();
    let mut maximize = false;

    let mut obj_row: Option<String> = None;
    let mut free_rows: Vec<String> = Vec::new();
    let mut row_names: Vec<String> = Vec::new();
    let mut row_senses: Vec<Sense> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut ranges: Vec<Option<f64>> = Vec::new();

    let mut cols: Vec<ColumnData> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut in_integer_block = false;
    let mut saw_endata = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let indented = raw.starts_with(' ') || raw.starts_with('\t');
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }

        if !indented {
            if in_integer_block {
                return Err(err(line, "INTORG marker not closed before section end"));
            }
            section = match tokens[0] {
                "NAME" => {
                    if tokens.len() > 1 {
                        name = tokens[1].to_string();
                    }
                    Section::Name
                }
                "OBJSENSE" => {
                    if let Some(&value) = tokens.get(1) {
                        maximize = parse_objsense(value, line)?;
                        Section::Name // value consumed, nothing more expected
                    } else {
                        Section::ObjSense
                    }
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    saw_endata = true;
                    Section::Done
                }
                other => return Err(err(line, format!("unknown section {other:?}"))),
            };
            if section == Section::Done {
                break;
            }
            continue;
        }

        match section {
            Section::ObjSense => {
                maximize = parse_objsense(tokens[0], line)?;
                section = Section::Name;
            }
            Section::Rows => {
                if tokens.len() < 2 {
                    return Err(err(line, "ROWS entry needs a sense and a name"));
                }
                let row_name = tokens[1].to_string();
                match tokens[0] {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(row_name);
                        } else {
                            warn!(row = %row_name, "ignoring extra free row");
                            free_rows.push(row_name);
                        }
                    }
                    s @ ("L" | "G" | "E") => {
                        let sense = match s {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            _ => Sense::Eq,
                        };
                        if row_index.contains_key(&row_name) {
                            return Err(err(line, format!("duplicate row {row_name:?}")));
                        }
                        row_index.insert(row_name.clone(), row_names.len());
                        row_names.push(row_name);
                        row_senses.push(sense);
                        rhs.push(0.0);
                        ranges.push(None);
                    }
                    other => return Err(err(line, format!("unknown row sense {other:?}"))),
                }
            }
            Section::Columns => {
                if tokens.iter().any(|t| *t == "'MARKER'") {
                    if tokens.iter().any(|t| *t == "'INTORG'") {
                        if in_integer_block {
                            return Err(err(line, "nested INTORG marker"));
                        }
                        in_integer_block = true;
                    } else if tokens.iter().any(|t| *t == "'INTEND'") {
                        if !in_integer_block {
                            return Err(err(line, "INTEND without matching INTORG"));
                        }
                        in_integer_block = false;
                    } else {
                        return Err(err(line, "marker line is neither INTORG nor INTEND"));
                    }
                    continue;
                }
                if tokens.len() < 3 || tokens.len() % 2 == 0 {
                    return Err(err(line, "COLUMNS entry needs name and row/value pairs"));
                }
                let col_name = tokens[0];
                let ci = *col_index.entry(col_name.to_string()).or_insert_with(|| {
                    cols.push(ColumnData {
                        name: col_name.to_string(),
                        objective: 0.0,
                        entries: Vec::new(),
                        integer: in_integer_block,
                        lower: None,
                        upper: None,
                    });
                    cols.len() - 1
                });
                if in_integer_block {
                    cols[ci].integer = true;
                }
                for pair in tokens[1..].chunks(2) {
                    let row_name = pair[0];
                    let value = parse_num(pair[1], line)?;
                    if Some(row_name) == obj_row.as_deref() {
                        cols[ci].objective += value;
                    } else if free_rows.iter().any(|f| f == row_name) {
                        // free row, already warned at declaration
                    } else if let Some(&ri) = row_index.get(row_name) {
                        cols[ci].entries.push((ri, value));
                    } else {
                        return Err(err(line, format!("unknown row {row_name:?} in COLUMNS")));
                    }
                }
            }
            Section::Rhs => {
                parse_row_value_pairs(&tokens, line, &row_index, obj_row.as_deref(), |ri, v| {
                    rhs[ri] = v
                })?;
            }
            Section::Ranges => {
                parse_row_value_pairs(&tokens, line, &row_index, obj_row.as_deref(), |ri, v| {
                    ranges[ri] = Some(v)
                })?;
            }
            Section::Bounds => {
                if tokens.len() < 3 {
                    return Err(err(line, "BOUNDS entry needs type, set name, and column"));
                }
                let btype = tokens[0];
                let col_name = tokens[2];
                let Some(&ci) = col_index.get(col_name) else {
                    return Err(err(line, format!("bound on unknown column {col_name:?}")));
                };
                let value = if matches!(btype, "FR" | "MI" | "PL" | "BV") {
                    0.0
                } else {
                    let Some(tok) = tokens.get(3) else {
                        return Err(err(line, format!("bound type {btype} needs a value")));
                    };
                    parse_num(tok, line)?
                };
                match btype {
                    "UP" | "UI" => cols[ci].upper = Some(value),
                    "LO" | "LI" => cols[ci].lower = Some(value),
                    "FX" => {
                        cols[ci].lower = Some(value);
                        cols[ci].upper = Some(value);
                    }
                    "FR" => {
                        cols[ci].lower = Some(-INF);
                        cols[ci].upper = Some(INF);
                    }
                    "MI" => cols[ci].lower = Some(-INF),
                    "PL" => cols[ci].upper = Some(INF),
                    "BV" => {
                        cols[ci].lower = Some(0.0);
                        cols[ci].upper = Some(1.0);
                        cols[ci].integer = true;
                    }
                    other => return Err(err(line, format!("unknown bound type {other:?}"))),
                }
            }
            Section::None | Section::Name | Section::Done => {
                return Err(err(line, "data line outside of any section"));
            }
        }
    }

    if in_integer_block {
        return Err(err(text.lines().count(), "INTORG marker never closed"));
    }
    if !saw_endata {
        warn!("missing ENDATA");
    }
    if cols.is_empty() {
        return Err(MipError::EmptyInstance);
    }

    // Assemble rows; RANGES expand into a paired inequality.
    let mut rows: Vec<Row> = row_names
        .iter()
        .zip(&row_senses)
        .enumerate()
        .map(|(ri, (rn, &sense))| Row {
            name: rn.clone(),
            coeffs: Vec::new(),
            sense,
            rhs: rhs[ri],
        })
        .collect();
    for (ci, col) in cols.iter().enumerate() {
        for &(ri, v) in &col.entries {
            rows[ri].coeffs.push((ci, v));
        }
    }
    for row in &mut rows {
        row.coeffs.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.coeffs.len());
        for &(j, v) in &row.coeffs {
            match merged.last_mut() {
                Some((pj, pv)) if *pj == j => *pv += v,
                _ => merged.push((j, v)),
            }
        }
        row.coeffs = merged;
    }
    let mut expanded: Vec<Row> = Vec::with_capacity(rows.len());
    for (ri, mut row) in rows.into_iter().enumerate() {
        match ranges[ri] {
            None => expanded.push(row),
            Some(r) => {
                let b = row.rhs;
                let (lo, up) = match row.sense {
                    Sense::Le => (b - r.abs(), b),
                    Sense::Ge => (b, b + r.abs()),
                    Sense::Eq => {
                        if r >= 0.0 {
                            (b, b + r)
                        } else {
                            (b + r, b)
                        }
                    }
                };
                let pair_name = format!("{}#rng", row.name);
                row.sense = Sense::Ge;
                row.rhs = lo;
                let upper_row = Row {
                    name: pair_name,
                    coeffs: row.coeffs.clone(),
                    sense: Sense::Le,
                    rhs: up,
                };
                expanded.push(row);
                expanded.push(upper_row);
            }
        }
    }

    let n = cols.len();
    let mut objective = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut var_names = Vec::with_capacity(n);
    let mut integers = Vec::new();
    for (ci, col) in cols.iter().enumerate() {
        let c = if maximize { -col.objective } else { col.objective };
        objective.push(c);
        let (dlo, dup) = if col.integer { (0.0, 1.0) } else { (0.0, INF) };
        lower.push(col.lower.unwrap_or(dlo));
        upper.push(col.upper.unwrap_or(dup));
        var_names.push(col.name.clone());
        if col.integer {
            integers.push(ci);
        }
    }

    let inst = MipInstance {
        name,
        var_names,
        objective,
        rows: expanded,
        lower,
        upper,
        integers,
        maximize_flipped: maximize,
    };
    inst.validate()?;
    Ok(inst)
}

fn parse_objsense(tok: &str, line: usize) -> Result<bool, MipError> {
    match tok {
        "MAX" | "MAXIMIZE" => Ok(true),
        "MIN" | "MINIMIZE" => Ok(false),
        other => Err(err(line, format!("unknown objective sense {other:?}"))),
    }
}

fn parse_row_value_pairs(
    tokens: &[&str],
    line: usize,
    row_index: &HashMap<String, usize>,
    obj_row: Option<&str>,
    mut set: impl FnMut(usize, f64),
) -> Result<(), MipError> {
    if tokens.len() < 3 || tokens.len() % 2 == 0 {
        return Err(err(line, "entry needs a set name and row/value pairs"));
    }
    for pair in tokens[1..].chunks(2) {
        let row_name = pair[0];
        let value = parse_num(pair[1], line)?;
        if Some(row_name) == obj_row {
            warn!("ignoring objective-row entry in RHS/RANGES");
        } else if let Some(&ri) = row_index.get(row_name) {
            set(ri, value);
        } else {
            return Err(err(line, format!("unknown row {row_name:?}")));
        }
    }
    Ok(())
}

/// Writes an instance back out as free-format MPS. Parsing the output yields
/// an instance equal field by field, which is what the round-trip tests pin.
pub fn write_mps(inst: &MipInstance) -> String {
    let mut out = String::new();
    let fmt = |v: f64| format!("{v}");
    out.push_str(&format!("NAME {}\n", inst.name));
    if inst.maximize_flipped {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n N  OBJ\n");
    for row in &inst.rows {
        let s = match row.sense {
            Sense::Le => "L",
            Sense::Eq => "E",
            Sense::Ge => "G",
        };
        out.push_str(&format!(" {}  {}\n", s, row.name));
    }
    out.push_str("COLUMNS\n");
    let is_integer = {
        let mut flags = vec![false; inst.num_vars()];
        for &j in &inst.integers {
            flags[j] = true;
        }
        flags
    };
    let mut in_block = false;
    for j in 0..inst.num_vars() {
        if is_integer[j] != in_block {
            let marker = if is_integer[j] { "'INTORG'" } else { "'INTEND'" };
            out.push_str(&format!("    MRK{j}  'MARKER'  {marker}\n"));
            in_block = is_integer[j];
        }
        // The written objective is the caller-facing one.
        let c = if inst.maximize_flipped {
            -inst.objective[j]
        } else {
            inst.objective[j]
        };
        let mut wrote_any = false;
        if c != 0.0 {
            out.push_str(&format!("    {}  OBJ  {}\n", inst.var_names[j], fmt(c)));
            wrote_any = true;
        }
        for row in &inst.rows {
            if let Some(&(_, v)) = row.coeffs.iter().find(|&&(cj, _)| cj == j) {
                out.push_str(&format!(
                    "    {}  {}  {}\n",
                    inst.var_names[j],
                    row.name,
                    fmt(v)
                ));
                wrote_any = true;
            }
        }
        if !wrote_any {
            // Declare the column so the variable survives a round trip.
            out.push_str(&format!("    {}  OBJ  0\n", inst.var_names[j]));
        }
    }
    if in_block {
        out.push_str("    MRKEND  'MARKER'  'INTEND'\n");
    }
    out.push_str("RHS\n");
    for row in &inst.rows {
        if row.rhs != 0.0 {
            out.push_str(&format!("    RHS  {}  {}\n", row.name, fmt(row.rhs)));
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..inst.num_vars() {
        let name = &inst.var_names[j];
        let (lo, up) = (inst.lower[j], inst.upper[j]);
        if is_integer[j] {
            // Binary by construction; make it explicit.
            out.push_str(&format!(" UP BND  {name}  1\n"));
            continue;
        }
        if lo == 0.0 && up == INF {
            continue;
        }
        if lo == up {
            out.push_str(&format!(" FX BND  {name}  {}\n", fmt(lo)));
            continue;
        }
        if lo == -INF && up == INF {
            out.push_str(&format!(" FR BND  {name}\n"));
            continue;
        }
        if lo == -INF {
            out.push_str(&format!(" MI BND  {name}\n"));
        } else if lo != 0.0 {
            out.push_str(&format!(" LO BND  {name}  {}\n", fmt(lo)));
        }
        if up != INF {
            out.push_str(&format!(" UP BND  {name}  {}\n", fmt(up)));
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const KNAP2: &str = "\
NAME knap2
OBJSENSE
    MAX
ROWS
 N  OBJ
 L  cap
COLUMNS
    MRK0  'MARKER'  'INTORG'
    x  OBJ  1  cap  1
    y  OBJ  1  cap  1
    MRK1  'MARKER'  'INTEND'
RHS
    RHS  cap  1
BOUNDS
 UP BND  x  1
 UP BND  y  1
ENDATA
";

    #[test]
    fn parses_two_var_knapsack() {
        let inst = parse_mps(KNAP2).unwrap();
        assert_eq!(inst.num_vars(), 2);
        assert_eq!(inst.num_cons(), 1);
        assert_eq!(inst.integers, vec![0, 1]);
        assert!(inst.maximize_flipped);
        // Stored minimization form: objective negated.
        assert_eq!(inst.objective, vec![-1.0, -1.0]);
        assert_eq!(inst.rows[0].rhs, 1.0);
        assert_eq!(inst.rows[0].coeffs, vec![(0, 1.0), (1, 1.0)]);
    }

    #[test]
    fn dangling_intorg_is_rejected() {
        let bad = "\
NAME t
ROWS
 N  OBJ
 L  c
COLUMNS
    M  'MARKER'  'INTORG'
    x  OBJ  1  c  1
RHS
    RHS  c  1
ENDATA
";
        assert!(matches!(
            parse_mps(bad),
            Err(MipError::MalformedMps { .. })
        ));
    }

    #[test]
    fn non_binary_integer_bound_is_rejected() {
        let bad = "\
NAME t
ROWS
 N  OBJ
 L  c
COLUMNS
    M  'MARKER'  'INTORG'
    x  OBJ  1  c  1
    M2  'MARKER'  'INTEND'
RHS
    RHS  c  2
BOUNDS
 UP BND  x  2
ENDATA
";
        assert!(matches!(
            parse_mps(bad),
            Err(MipError::NotMixedBinary { .. })
        ));
    }

    #[test]
    fn unknown_section_is_rejected() {
        assert!(matches!(
            parse_mps("NAME t\nROWZ\nENDATA\n"),
            Err(MipError::MalformedMps { .. })
        ));
    }

    #[test]
    fn empty_instance_is_rejected() {
        assert!(matches!(
            parse_mps("NAME t\nROWS\n N OBJ\nCOLUMNS\nENDATA\n"),
            Err(MipError::EmptyInstance)
        ));
    }

    #[test]
    fn ranges_expand_to_inequality_pair() {
        let text = "\
NAME t
ROWS
 N  OBJ
 L  c
COLUMNS
    x  OBJ  1  c  1
RHS
    RHS  c  5
RANGES
    RNG  c  2
ENDATA
";
        let inst = parse_mps(text).unwrap();
        assert_eq!(inst.num_cons(), 2);
        assert_eq!(inst.rows[0].sense, Sense::Ge);
        assert_eq!(inst.rows[0].rhs, 3.0);
        assert_eq!(inst.rows[1].sense, Sense::Le);
        assert_eq!(inst.rows[1].rhs, 5.0);
    }

    #[test]
    fn roundtrip_is_field_exact() {
        let inst = parse_mps(KNAP2).unwrap();
        let text = write_mps(&inst);
        let again = parse_mps(&text).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn free_rows_are_ignored() {
        let text = "\
NAME t
ROWS
 N  OBJ
 N  EXTRA
 L  c
COLUMNS
    x  OBJ  1  c  1  EXTRA  3
RHS
    RHS  c  1
ENDATA
";
        let inst = parse_mps(text).unwrap();
        assert_eq!(inst.num_cons(), 1);
        assert_eq!(inst.objective, vec![1.0]);
    }
}
