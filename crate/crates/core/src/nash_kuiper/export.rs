//! Wavefront OBJ export of a sampled surface and the per-stage report CSV.

use super::geometry::check_map;
use super::stage::RunReport;
use crate::error::Result;
use crate::fields::io::{csv_bytes, fmt_f64};
use crate::fields::VectorField;

/// One vertex per sample, two triangles per grid cell (1-based), wrapping on periodic grids.
pub fn to_obj(u: &VectorField) -> Result<String> {
    check_map(u)?;
    let g = u.grid;
    let n = g.resolution;
    let mut out = String::with_capacity(g.len() * 80);
    for i in 0..g.len() {
        out.push_str(&format!(
            "v {} {} {}\n",
            fmt_f64(u.comps[0][i]),
            fmt_f64(u.comps[1][i]),
            fmt_f64(u.comps[2][i])
        ));
    }
    let cells = if g.is_periodic() { n } else { n - 1 };
    let id = |i: usize, j: usize| g.index(i % n, j % n) + 1;
    for j in 0..cells {
        for i in 0..cells {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            out.push_str(&format!("f {a} {b} {c}\nf {a} {c} {d}\n"));
        }
    }
    Ok(out)
}

pub const REPORT_HEADER: [&str; 8] = [
    "stage", "deficit_sup", "c1", "c2", "lambda_1", "lambda_2", "lambda_3", "lambda_4",
];

/// Row 0 is the starting map; unused frequency columns stay empty.
pub fn report_csv(r: &RunReport) -> Result<Vec<u8>> {
    let mut rows = vec![vec![
        "0".to_string(),
        fmt_f64(r.deficit0),
        fmt_f64(r.c1_0),
        fmt_f64(r.c2_0),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ]];
    for (j, s) in r.stages.iter().enumerate() {
        let mut row = vec![
            (j + 1).to_string(),
            fmt_f64(s.deficit_after),
            fmt_f64(s.c1_after),
            fmt_f64(s.c2_after),
        ];
        for k in 0..4 {
            row.push(s.lambdas.get(k).map(|l| fmt_f64(*l)).unwrap_or_default());
        }
        rows.push(row);
    }
    csv_bytes(&REPORT_HEADER, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    #[test]
    fn face_counts() {
        let g = Grid::clamped(2, 8, 1.0).unwrap();
        let u = VectorField::from_fn(g, |x, y, _| [x, y, 0.0]);
        let s = to_obj(&u).unwrap();
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 64);
        assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 98);
        let p = Grid::periodic(2, 8, 1.0).unwrap();
        let u = VectorField::from_fn(p, |x, y, _| [x, y, 0.0]);
        let s = to_obj(&u).unwrap();
        assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 128);
        assert!(s.lines().filter(|l| l.starts_with("f ")).all(|l| l
            .split_whitespace()
            .skip(1)
            .all(|k| (1..=64).contains(&k.parse::<usize>().unwrap()))));
    }
}
