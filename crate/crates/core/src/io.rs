//! Plain-text output: convergence history CSV, field dumps, reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{GcgError, Result};
use crate::field::{ControlField, GridMeta};
use crate::solver::IterateRecord;

pub const HISTORY_HEADER: &str = "k,j,gap,step,backtracks,err_u,err_v";

fn io_err(path: &Path, source: std::io::Error) -> GcgError {
    GcgError::Io { path: path.display().to_string(), source }
}

/// Shortest decimal that parses back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn history_to_csv(history: &[IterateRecord]) -> String {
    let mut s = String::with_capacity(64 * (history.len() + 1));
    s.push_str(HISTORY_HEADER);
    s.push('\n');
    for r in history {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            num(r.j_value),
            num(r.gap),
            num(r.step),
            r.backtracks,
            opt(r.err_u),
            opt(r.err_v)
        ));
    }
    s
}

pub fn parse_history_csv(text: &str) -> Result<Vec<IterateRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HISTORY_HEADER => {}
        other => return Err(GcgError::Parse(format!("bad history header: {other:?}"))),
    }
    let float = |s: &str, line: usize| -> Result<f64> {
        s.parse().map_err(|_| GcgError::Parse(format!("history line {line}: bad number '{s}'")))
    };
    let opt_float = |s: &str, line: usize| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            float(s, line).map(Some)
        }
    };
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let no = i + 2;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(GcgError::Parse(format!("history line {no}: expected 7 columns, got {}", cols.len())));
        }
        out.push(IterateRecord {
            k: cols[0].parse().map_err(|_| GcgError::Parse(format!("history line {no}: bad index")))?,
            j_value: float(cols[1], no)?,
            gap: float(cols[2], no)?,
            step: float(cols[3], no)?,
            backtracks: cols[4].parse().map_err(|_| GcgError::Parse(format!("history line {no}: bad count")))?,
            err_u: opt_float(cols[5], no)?,
            err_v: opt_float(cols[6], no)?,
        });
    }
    Ok(out)
}

/// Header line of a field dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldHeader {
    Space { nx: usize, ny: usize, h: f64 },
    SpaceTime { nx: usize, ny: usize, nt: usize, h: f64, tau: f64 },
}

impl FieldHeader {
    pub fn of(field: &ControlField) -> Self {
        match field.meta() {
            GridMeta::Plain => Self::Space { nx: field.len(), ny: 1, h: 1.0 },
            GridMeta::Space(g) => Self::Space { nx: g.nx(), ny: g.ny(), h: g.h() },
            GridMeta::SpaceTime(st) => Self::SpaceTime {
                nx: st.space().nx(),
                ny: st.space().ny(),
                nt: st.nt(),
                h: st.space().h(),
                tau: st.tau(),
            },
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Self::Space { nx, ny, .. } => nx * ny,
            Self::SpaceTime { nx, ny, nt, .. } => nx * ny * nt,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Header, then one value per line in storage order with 17 significant digits.
pub fn field_to_string(field: &ControlField) -> String {
    let mut s = match FieldHeader::of(field) {
        FieldHeader::Space { nx, ny, h } => format!("{nx} {ny} {}\n", num(h)),
        FieldHeader::SpaceTime { nx, ny, nt, h, tau } => format!("{nx} {ny} {nt} {} {}\n", num(h), num(tau)),
    };
    for v in field.values() {
        s.push_str(&format!("{v:.16e}\n"));
    }
    s
}

pub fn parse_field(text: &str) -> Result<(FieldHeader, Vec<f64>)> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| GcgError::Parse("empty field file".into()))?;
    let parts: Vec<&str> = head.split_whitespace().collect();
    let bad = || GcgError::Parse(format!("bad field header '{head}'"));
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let flt = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let header = match parts.len() {
        3 => FieldHeader::Space { nx: int(parts[0])?, ny: int(parts[1])?, h: flt(parts[2])? },
        5 => FieldHeader::SpaceTime {
            nx: int(parts[0])?,
            ny: int(parts[1])?,
            nt: int(parts[2])?,
            h: flt(parts[3])?,
            tau: flt(parts[4])?,
        },
        _ => return Err(bad()),
    };
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().map_err(|_| GcgError::Parse(format!("bad field value '{l}'"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != header.len() {
        return Err(GcgError::DimensionMismatch { expected: header.len(), got: values.len() });
    }
    Ok((header, values))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{Grid, SpaceTimeGrid};

    fn rec(k: usize, err: Option<f64>) -> IterateRecord {
        IterateRecord { k, j_value: 0.1 + k as f64, gap: 1e-300, step: 0.99f64.powi(7), backtracks: 7, err_u: err, err_v: err }
    }

    #[test]
    fn history_round_trip() {
        let h = vec![rec(0, Some(1.0 / 3.0)), rec(1, None)];
        let csv = history_to_csv(&h);
        assert!(csv.starts_with("k,j,gap,step,backtracks,err_u,err_v\n"));
        assert!(csv.lines().nth(2).unwrap().ends_with(",7,,"));
        assert_eq!(parse_history_csv(&csv).unwrap(), h);
    }

    #[test]
    fn rejects_bad_history() {
        assert!(parse_history_csv("a,b\n").is_err());
        assert!(parse_history_csv(&format!("{HISTORY_HEADER}\n1,2,3\n")).is_err());
    }

    #[test]
    fn field_round_trip() {
        let g = Grid::square(3).unwrap();
        let vals: Vec<f64> = (0..9).map(|i| (i as f64).sqrt() - 1.0 / 7.0).collect();
        let f = ControlField::on_grid(&g, vals.clone()).unwrap();
        let text = field_to_string(&f);
        assert!(text.starts_with("3 3 0.25\n"));
        let (head, back) = parse_field(&text).unwrap();
        assert_eq!(head, FieldHeader::Space { nx: 3, ny: 3, h: 0.25 });
        assert_eq!(back, vals);

        let st = SpaceTimeGrid::new(Grid::line(2).unwrap(), 4, 1.0).unwrap();
        let f = ControlField::on_space_time(&st, vec![0.5; 8]).unwrap();
        let text = field_to_string(&f);
        assert!(text.starts_with("2 1 4 "));
        let (head, back) = parse_field(&text).unwrap();
        assert_eq!(head.len(), 8);
        assert_eq!(back, vec![0.5; 8]);
    }
}
