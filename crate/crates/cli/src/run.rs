use std::fs;
use std::io::Write;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ncpath::config::{set_path, RunConfig};
use ncpath::exec::{self, Policy};
use ncpath::io::{fmt_f64, write_kernel, CsvTable};
use ncpath::oracle::oracle_compare;
use ncpath::phi::{full_audit, midpoint_limit_check, parse_rational, to_f64, Q};
use ncpath::potential::evaluate_potential_shifted;
use ncpath::slicer::{alpha_sweep, full_kernel, unitarity_table};
use ncpath::star::{potential_operator_kernel, star_apply, star_integral_identity_check, star_product_fields};
use ncpath::weyl::{symbol_of_operator, AlphaIndex};
use ncpath::{ComplexField, ThetaMatrix};

use crate::{Cli, Command, Common};

/// Version of the identity set checked by `phi-audit`.
const IDENTITY_SET_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

/// Applies `NCPATH_THREADS`: 1 selects the sequential path, larger values
/// size the worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NCPATH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| anyhow!("NCPATH_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        bail!("NCPATH_THREADS must be a positive integer, got `{raw}`");
    }
    if n == 1 {
        exec::set_policy(Policy::Sequential);
        return Ok(());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| anyhow!("cannot size worker pool: {e}"))?;
    exec::set_policy(Policy::Parallel);
    Ok(())
}

struct Loaded {
    cfg: RunConfig,
    hash: String,
}

fn load(common: &Common) -> Result<Loaded> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("this subcommand needs --config <file>"))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for o in &common.overrides {
        let (key, raw) = o
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects KEY=VALUE, got `{o}`"))?;
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut value, key.trim(), v)?;
    }
    let cfg = RunConfig::from_value(&value)?;
    let canonical = serde_json::to_string(&value)?;
    Ok(Loaded {
        cfg,
        hash: hex::encode(Sha256::digest(canonical.as_bytes())),
    })
}

fn flags_hash(parts: &[String]) -> String {
    hex::encode(Sha256::digest(parts.join("\n").as_bytes()))
}

fn emit(common: &Common, body: &str) -> Result<()> {
    match &common.out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn write_summary(common: &Common, subcommand: &str, hash: &str, table: Option<&CsvTable>, status: Status, extra: Value) -> Result<()> {
    let Some(path) = &common.summary else {
        return Ok(());
    };
    let mut doc = json!({
        "subcommand": subcommand,
        "status": if status == Status::Pass { "pass" } else { "fail" },
        "config_sha256": hash,
        "identity_set_version": IDENTITY_SET_VERSION,
        "ncpath_version": env!("CARGO_PKG_VERSION"),
        "extra": extra,
    });
    if let Some(t) = table {
        doc["columns"] = json!(t.header);
        doc["rows"] = json!(t.rows);
    }
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn alpha_list(values: &[f64]) -> Result<Vec<AlphaIndex>> {
    values.iter().map(|&a| AlphaIndex::new(a).map_err(Into::into)).collect()
}

fn finish(common: &Common, name: &str, hash: &str, table: &CsvTable, status: Status, extra: Value) -> Result<Status> {
    emit(common, &table.render())?;
    write_summary(common, name, hash, Some(table), status, extra)?;
    Ok(status)
}

fn status_of(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn execute(cli: &Cli) -> Result<Status> {
    let common = &cli.common;
    match &cli.command {
        Command::Symbol { alphas, tolerance } => symbol(common, alphas, *tolerance),
        Command::StarCheck { tolerance } => star_check(common, *tolerance),
        Command::Kernel { alpha, m } => kernel(common, *alpha, *m),
        Command::AlphaSweep { alphas, m_list } => sweep(common, alphas, m_list),
        Command::PhiAudit { m, alphas } => phi_audit(common, *m, alphas),
        Command::Limit324 { m_list, time } => limit(common, m_list, time),
        Command::OracleCompare {
            m_list,
            alpha,
            omit_runtime,
        } => oracle(common, m_list, *alpha, *omit_runtime),
        Command::Unitarity { m_list, alpha } => unitarity(common, m_list, *alpha),
    }
}

fn symbol(common: &Common, alphas: &[f64], tolerance: f64) -> Result<Status> {
    let l = load(common)?;
    let grid = l.cfg.build_grid()?;
    let alphas = alpha_list(alphas)?;
    let kernel = potential_operator_kernel(&l.cfg.potential, &l.cfg.theta, &grid)?;
    let syms = alphas
        .iter()
        .map(|&a| symbol_of_operator(&kernel, a))
        .collect::<ncpath::Result<Vec<_>>>()?;
    let n = grid.len();
    let exact: Vec<f64> = (0..n * n)
        .map(|i| {
            let (ix, ik) = (i / n, i % n);
            evaluate_potential_shifted(&l.cfg.potential, &l.cfg.theta, &grid.x_coord(ix), &grid.k_coord(ik))
        })
        .collect();
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut table = CsvTable::new(["alpha", "k_index", "x_index", "re", "im", "deviation"]);
    for (a, s) in alphas.iter().zip(&syms) {
        for ix in 0..n {
            for ik in 0..n {
                let z = s.get(ik, ix);
                table.push(vec![
                    fmt_f64(a.value()),
                    ik.to_string(),
                    ix.to_string(),
                    fmt_f64(z.re),
                    fmt_f64(z.im),
                    fmt_f64((z - exact[ix * n + ik]).norm()),
                ]);
            }
        }
    }
    let mut spread = 0.0f64;
    for i in 0..syms.len() {
        for j in i + 1..syms.len() {
            spread = spread.max(syms[i].max_abs_diff(&syms[j])?);
        }
    }
    let relative = if scale > 0.0 { spread / scale } else { spread };
    let status = status_of(relative <= tolerance);
    eprintln!("symbol: relative pairwise spread {relative:.3e} (tolerance {tolerance:.1e})");
    finish(common, "symbol", &l.hash, &table, status, json!({"relative_pairwise_spread": relative}))
}

fn star_check(common: &Common, tolerance: f64) -> Result<Status> {
    let l = load(common)?;
    let grid = l.cfg.build_grid()?;
    let phi = l.cfg.build_probe(&grid)?;
    let (center, width, momentum) = match &l.cfg.probe {
        Some(p) => (p.center.iter().map(|c| -0.5 * c).collect(), 0.8 * p.width, p.momentum.iter().map(|k| -k).collect()),
        None => (vec![0.0; grid.dim()], grid.box_half_width() / 8.0, vec![0.0; grid.dim()]),
    };
    let psi: ComplexField = ComplexField::gaussian(&grid, &center, width, &momentum)?;
    let theta = &l.cfg.theta;
    let integral = star_integral_identity_check(&phi, &psi, theta)?;
    let zero = ThetaMatrix::zero(grid.dim());
    let plain = star_product_fields(&phi, &psi, &zero)?;
    let degenerate = plain
        .values()
        .iter()
        .zip(phi.values().iter().zip(psi.values()))
        .map(|(s, (a, b))| (s - a * b).norm())
        .fold(0.0f64, f64::max);
    let via_kernel = potential_operator_kernel(&l.cfg.potential, theta, &grid)?.apply(&psi)?;
    let via_symbol = star_apply(&l.cfg.potential, theta, &psi)?;
    let kernel_dev = via_kernel.max_abs_diff(&via_symbol)?;
    let mut table = CsvTable::new(["check", "value", "tolerance", "pass"]);
    let mut ok = true;
    for (name, value, tol) in [
        ("integral_identity", integral, tolerance),
        ("theta_zero_degeneration", degenerate, 0.0),
        ("kernel_vs_symbol", kernel_dev, tolerance),
    ] {
        let pass = value <= tol;
        ok &= pass;
        table.push(vec![name.into(), fmt_f64(value), fmt_f64(tol), pass.to_string()]);
    }
    finish(common, "star-check", &l.hash, &table, status_of(ok), Value::Null)
}

fn kernel(common: &Common, alpha: Option<f64>, m: Option<usize>) -> Result<Status> {
    let l = load(common)?;
    let grid = l.cfg.build_grid()?;
    let mut cfg = l.cfg.slicing()?;
    if let Some(a) = alpha {
        cfg = cfg.with_alpha(AlphaIndex::new(a)?);
    }
    if let Some(m) = m {
        cfg = cfg.with_m(m);
    }
    let k = full_kernel(&cfg, &l.cfg.potential, &l.cfg.theta, &grid)?;
    let mut buf = Vec::new();
    write_kernel(&mut buf, &k, &l.cfg.theta)?;
    emit(common, std::str::from_utf8(&buf)?)?;
    write_summary(
        common,
        "kernel",
        &l.hash,
        None,
        Status::Pass,
        json!({"m": cfg.slices_m, "alpha": cfg.alpha.value(), "size": k.kernel.size()}),
    )?;
    Ok(Status::Pass)
}

fn sweep(common: &Common, alphas: &[f64], m_list: &[usize]) -> Result<Status> {
    let l = load(common)?;
    let grid = l.cfg.build_grid()?;
    let probe = l.cfg.build_probe(&grid)?;
    let rep = alpha_sweep(&l.cfg.slicing()?, &alpha_list(alphas)?, m_list, &l.cfg.potential, &l.cfg.theta, &grid, &probe)?;
    let mut table = CsvTable::new(["m", "alpha_pair", "spread"]);
    for r in &rep.rows {
        table.push(vec![
            r.m.to_string(),
            format!("{}:{}", fmt_f64(r.alpha_pair.0), fmt_f64(r.alpha_pair.1)),
            fmt_f64(r.spread),
        ]);
    }
    table.push(vec!["slope".into(), "fit".into(), fmt_f64(rep.slope)]);
    table.push(vec!["residual".into(), "fit".into(), fmt_f64(rep.residual)]);
    finish(
        common,
        "alpha-sweep",
        &l.hash,
        &table,
        Status::Pass,
        json!({"slope": rep.slope, "residual": rep.residual, "spreads": rep.spreads}),
    )
}

fn phi_audit(common: &Common, m: usize, alphas: &[String]) -> Result<Status> {
    let parsed = alphas.iter().map(|a| parse_rational(a)).collect::<ncpath::Result<Vec<Q>>>()?;
    let rows = full_audit(m, &parsed)?;
    let mut table = CsvTable::new(["identity", "alpha", "pass", "detail"]);
    let mut ok = true;
    for r in &rows {
        ok &= r.passed;
        table.push(vec![
            r.identity.to_string(),
            r.alpha.as_ref().map_or_else(|| "-".to_string(), |a| a.to_string()),
            if r.passed { "PASS" } else { "FAIL" }.to_string(),
            format!("\"{}\"", r.detail.replace('"', "'")),
        ]);
    }
    let mut parts = vec![format!("m={m}")];
    parts.extend(alphas.iter().cloned());
    finish(common, "phi-audit", &flags_hash(&parts), &table, status_of(ok), json!({"m": m}))
}

fn limit(common: &Common, m_list: &[usize], time: &str) -> Result<Status> {
    let t = parse_rational(time)?;
    let t2 = &t * &t;
    let mut table = CsvTable::new(["m", "value", "error", "value_f64", "error_f64"]);
    let mut ok = true;
    for &m in m_list {
        let c = midpoint_limit_check(m, &t)?;
        let mq = Q::from_integer((m as i64).into());
        ok &= c.value == &t2 * &mq / (&mq + Q::from_integer(1.into())) && c.error == &t2 / (&mq + Q::from_integer(1.into()));
        table.push(vec![
            m.to_string(),
            c.value.to_string(),
            c.error.to_string(),
            fmt_f64(to_f64(&c.value)),
            fmt_f64(to_f64(&c.error)),
        ]);
    }
    let mut parts: Vec<String> = m_list.iter().map(|m| m.to_string()).collect();
    parts.push(time.to_string());
    finish(common, "limit-324", &flags_hash(&parts), &table, status_of(ok), Value::Null)
}

fn oracle(common: &Common, m_list: &[usize], alpha: Option<f64>, omit_runtime: bool) -> Result<Status> {
    let l = load(common)?;
    let grid = l.cfg.build_grid()?;
    let probe = l.cfg.build_probe(&grid)?;
    let mut cfg = l.cfg.slicing()?;
    if let Some(a) = alpha {
        cfg = cfg.with_alpha(AlphaIndex::new(a)?);
    }
    let t0 = Instant::now();
    let rows = oracle_compare(&cfg, m_list, &l.cfg.potential, &l.cfg.theta, &grid, &probe)?;
    let mut table = if omit_runtime {
        CsvTable::new(["m", "l2_error"])
    } else {
        CsvTable::new(["m", "l2_error", "runtime_s"])
    };
    for r in &rows {
        let mut row = vec![r.m.to_string(), fmt_f64(r.l2_error)];
        if !omit_runtime {
            row.push(fmt_f64(r.seconds));
        }
        table.push(row);
    }
    let monotone = rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error);
    let extra = json!({"monotone": monotone, "total_seconds": if omit_runtime { Value::Null } else { json!(t0.elapsed().as_secs_f64()) }});
    finish(common, "oracle-compare", &l.hash, &table, Status::Pass, extra)
}

fn unitarity(common: &Common, m_list: &[usize], alpha: Option<f64>) -> Result<Status> {
    let l = load(common)?;
    let grid = l.cfg.build_grid()?;
    let probe = l.cfg.build_probe(&grid)?;
    let mut cfg = l.cfg.slicing()?;
    if let Some(a) = alpha {
        cfg = cfg.with_alpha(AlphaIndex::new(a)?);
    }
    let rows = unitarity_table(&cfg, m_list, &l.cfg.potential, &l.cfg.theta, &probe)?;
    let mut table = CsvTable::new(["m", "norm_ratio"]);
    for (m, r) in &rows {
        table.push(vec![m.to_string(), fmt_f64(*r)]);
    }
    finish(common, "unitarity", &l.hash, &table, Status::Pass, Value::Null)
}
