//! The four commands behind the `hedgepde` binary. Each writes its files into
//! the output directory, every file led by the config-hash comment, and
//! returns what should go to stdout. Wall-clock timings only ever reach
//! stdout so the files stay byte-reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::RunConfig;
use crate::convergence::run_study;
use crate::error::{Error, Result};
use crate::grid::fmt17;
use crate::mc::verify_with_states;
use crate::replication::{replication_summary, rho_sweep};
use crate::system::{march_system_with, MarchOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    SweepRho,
    McVerify,
    Converge,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::SweepRho => "sweep-rho",
            Command::McVerify => "mc-verify",
            Command::Converge => "converge",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub stdout: String,
    /// The command ran but reported a failure (a sweep column that did not
    /// solve, a verification inequality that did not hold).
    pub failed: bool,
}

/// Observed-order windows reported by `converge`.
pub const TIME_ORDER_RANGE: (f64, f64) = (0.8, 1.2);
pub const SPACE_ORDER_RANGE: (f64, f64) = (1.7, 2.3);

struct Writer<'a> {
    dir: &'a Path,
    header: String,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    /// Writes `body` after the header line.
    fn put(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        let mut text = String::with_capacity(self.header.len() + body.len() + 1);
        text.push_str(&self.header);
        text.push('\n');
        text.push_str(body);
        fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run(command: Command, config: &RunConfig, out: &Path) -> Result<Outcome> {
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let mut w = Writer {
        dir: out,
        header: config.header(),
        files: Vec::new(),
    };
    w.put("config.effective.txt", &config.echo())?;
    let started = Instant::now();
    let (mut stdout, failed) = match command {
        Command::Solve => solve(config, &mut w)?,
        Command::SweepRho => sweep(config, &mut w)?,
        Command::McVerify => mc_verify(config, &mut w)?,
        Command::Converge => converge(config, &mut w)?,
    };
    let _ = writeln!(
        stdout,
        "{}: {:.3} s, config_hash={}",
        command.name(),
        started.elapsed().as_secs_f64(),
        config.hash()
    );
    Ok(Outcome {
        files: w.files,
        stdout,
        failed,
    })
}

fn solve(config: &RunConfig, w: &mut Writer) -> Result<(String, bool)> {
    let grid = config.grid()?;
    let mut u3_min = f64::INFINITY;
    let t = Instant::now();
    let march = march_system_with(
        &config.params,
        &grid,
        &config.payoff,
        config.n_steps,
        MarchOptions {
            retain_stride: config.n_steps,
            ..Default::default()
        },
        |_, s| {
            u3_min = u3_min.min(s.u3.min());
            Ok(())
        },
    )?;
    let march_time = t.elapsed().as_secs_f64();
    let last = march.last();
    let r = replication_summary(last, &config.params, config.eval_point)?;
    let z = config.eval_point.price.ln();
    let stats = &march.stats;
    let max = |v: &[usize]| v.iter().copied().max().unwrap_or(0);

    let mut s = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    put("sigma_obs", fmt17(r.eval_point.sigma));
    put("p_obs", fmt17(r.eval_point.price));
    put("v0_star", fmt17(r.v0_star));
    put("eps_star", fmt17(r.eps_star));
    put("c0", fmt17(r.c0));
    put("clamp_magnitude", fmt17(r.clamp_magnitude));
    put("clamped", r.clamped.to_string());
    put("a0_obs", fmt17(last.u1.interpolate(r.eval_point.sigma)?.exp()));
    put("ln_a0_obs", fmt17(last.u1.interpolate(r.eval_point.sigma)?));
    put("theta0_obs", fmt17(r.theta0.interpolate(r.eval_point.sigma, z)?));
    put("u3_min", fmt17(u3_min));
    put("picard_passes_max", max(&stats.picard_passes).to_string());
    put("krylov_b_max", max(&stats.krylov_b).to_string());
    put("krylov_c_max", max(&stats.krylov_c).to_string());
    w.put("summary.txt", &s)?;
    w.put("a0.csv", &r.a0_profile.to_csv())?;
    w.put("u1.csv", &last.u1.to_csv())?;
    w.put("b.csv", &last.u2.to_csv())?;
    w.put("c.csv", &last.u3.to_csv())?;
    w.put("theta0.csv", &r.theta0.to_csv())?;

    let mut out = String::new();
    let _ = writeln!(out, "V0* = {}  eps* = {}  clamped = {}", r.v0_star, r.eps_star, r.clamped);
    let _ = writeln!(out, "march: {march_time:.3} s");
    Ok((out, false))
}

fn sweep(config: &RunConfig, w: &mut Writer) -> Result<(String, bool)> {
    let sweep = rho_sweep(&config.params, &config.sweep_rho, config.grid_x()?, config.n_steps)?;
    w.put("a0_sweep.csv", &sweep.to_csv(None))?;
    w.put("ln_a0_sweep.csv", &sweep.to_log_csv(None))?;
    let mut out = String::new();
    let failures = sweep.failures();
    for (rho, e) in &failures {
        let _ = writeln!(out, "rho={rho}: {e}");
    }
    Ok((out, !failures.is_empty()))
}

fn mc_verify(config: &RunConfig, w: &mut Writer) -> Result<(String, bool)> {
    let grid = config.grid()?;
    let t = Instant::now();
    let march = march_system_with(
        &config.params,
        &grid,
        &config.payoff,
        config.n_steps,
        MarchOptions {
            retain_stride: config.retain_stride,
            ..Default::default()
        },
        |_, _| Ok(()),
    )?;
    let march_time = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let report = verify_with_states(&march.states, &config.params, &config.payoff, &config.sim, config.eval_point)?;
    let mc_time = t.elapsed().as_secs_f64();
    w.put("verify.txt", &report.to_text(None))?;
    if config.write_paths {
        w.put("paths.csv", &report.estimate.paths_csv(None))?;
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "MC = {} +- {}  c(0) = {}  pass = {}",
        report.estimate.mean_sq_error,
        report.estimate.std_error,
        report.c0,
        report.passes()
    );
    let _ = writeln!(out, "march: {march_time:.3} s, paths: {mc_time:.3} s");
    Ok((out, !report.passes()))
}

fn converge(config: &RunConfig, w: &mut Writer) -> Result<(String, bool)> {
    let study = run_study(&config.params, &config.converge)?;
    let mut csv = String::from("study,nodes,h_x,h_z,steps,dt,error,order\n");
    for (name, runs) in [("space", &study.space), ("time", &study.time)] {
        for r in runs {
            let _ = writeln!(
                csv,
                "{name},{},{},{},{},{},{},{}",
                r.nodes,
                fmt17(r.h_x),
                fmt17(r.h_z),
                r.steps,
                fmt17(r.dt),
                fmt17(r.error),
                fmt17(r.order)
            );
        }
    }
    w.put("converge.csv", &csv)?;

    let inside = |v: &[f64], (lo, hi): (f64, f64)| !v.is_empty() && v.iter().all(|o| (lo..=hi).contains(o));
    let (to, so) = (study.time_orders(), study.space_orders());
    let join = |v: &[f64]| v.iter().map(|o| fmt17(*o)).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "time_orders={}", join(&to));
    let _ = writeln!(s, "space_orders={}", join(&so));
    let _ = writeln!(s, "time_order_in_range={}", inside(&to, TIME_ORDER_RANGE));
    let _ = writeln!(s, "space_order_in_range={}", inside(&so, SPACE_ORDER_RANGE));
    w.put("converge.txt", &s)?;
    Ok((s, false))
}
