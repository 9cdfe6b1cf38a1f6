//! Plain-text artifacts: CSV tables and kernel files.

use std::fmt::Write as _;
use std::io::{self, Write};

use num_complex::Complex64 as C64;

use crate::kernel::PropagatorKernel;
use crate::params::ThetaMatrix;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with a header row; cells are written verbatim.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(self.render().as_bytes())
    }
}

/// Header line: N, G, L, m, alpha, T, hbar, mass, then θ row-major.
pub fn kernel_header(k: &PropagatorKernel, theta: &ThetaMatrix) -> String {
    let g = k.grid();
    let mut s = format!(
        "# N={} G={} L={}",
        g.dim(),
        g.points_per_axis(),
        fmt_f64(g.box_half_width())
    );
    match &k.config {
        Some(c) => {
            let _ = write!(
                s,
                " m={} alpha={} T={} hbar={} mass={}",
                c.slices_m,
                fmt_f64(c.alpha.value()),
                fmt_f64(c.total_time),
                fmt_f64(c.params.hbar),
                fmt_f64(c.params.mass)
            );
        }
        None => {
            let _ = write!(s, " m=0 alpha=0 T={} hbar={} mass=0", fmt_f64(k.total_time), fmt_f64(g.hbar()));
        }
    }
    s.push_str(" theta=");
    let entries: Vec<String> = theta.rows().iter().flatten().map(|&v| fmt_f64(v)).collect();
    s.push_str(&entries.join(";"));
    s
}

/// Writes the header, then one matrix row per line as `re,im` pairs.
pub fn write_kernel(mut w: impl Write, k: &PropagatorKernel, theta: &ThetaMatrix) -> io::Result<()> {
    writeln!(w, "{}", kernel_header(k, theta))?;
    let n = k.kernel.size();
    let mut line = String::new();
    for r in 0..n {
        line.clear();
        for (c, z) in k.kernel.row(r).iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            push_complex(&mut line, *z);
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

fn push_complex(s: &mut String, z: C64) {
    let _ = write!(s, "{:.16e},{:.16e}", z.re, z.im);
}
