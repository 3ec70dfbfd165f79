use anyhow::{bail, Result};
use serde_json::json;
use zeno_core::decay::{gaussian_zeno_limit_at, ClassicalDecayParams, ZenoParams};
use zeno_core::pipeline::{landau_peierls_max_n, make_survival_curve, MeasurementCount, SurvivalCurve, SurvivalLaw};
use zeno_core::response_first::{
    counterterm, decay_probability_first, f1_piece, f2_piece, response_renormalized, QubitFieldParams,
};
use zeno_core::response_second::{
    response_second_small_time, response_second_total, small_time_coeff_p, small_time_coeff_q, small_time_regime,
    FieldState,
};

use crate::config::{CommandKind, Kernel, RunConfig};
use crate::output::{Cell, Table};
use crate::verify::{run_verification, Report};

/// What a command produced: the table to write, diagnostics for the error
/// stream, and the verification report when there is one.
pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    pub report: Option<Report>,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self {
            table,
            notes: Vec::new(),
            report: None,
        }
    }
}

/// Default regulator for `response-second`, as a fraction of `delta_tau`.
pub const DEFAULT_EPSILON_SCALE: f64 = 1e-3;

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        CommandKind::Classical => classical(cfg),
        CommandKind::ZenoGaussian => zeno_gaussian(cfg),
        CommandKind::ResponseFirst => response_first(cfg),
        CommandKind::ResponseSecond => response_second(cfg),
        CommandKind::ZenoCurve => zeno_curve(cfg),
        CommandKind::Verify => Ok(verify(cfg)),
    }
}

fn curve_table(curve: &SurvivalCurve) -> Table {
    let mut t = Table::new(vec!["time", "survival"]);
    for &(time, s) in &curve.points {
        t.push(vec![time.into(), s.into()]);
    }
    t
}

fn classical(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let law = SurvivalLaw::Classical(ClassicalDecayParams::new(p.tau_e.unwrap_or_default())?);
    let curve = make_survival_curve(&law, p.total_time.unwrap_or_default(), cfg.points())?;
    Ok(Outcome::table(curve_table(&curve)))
}

fn zeno_gaussian(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let count = match p.count.map(|c| c.0) {
        Some(MeasurementCount::Finite(n)) => n,
        _ => bail!("`zeno-gaussian` needs a finite --N"),
    };
    let zeno = ZenoParams::new(p.tau_z.unwrap_or_default())?;
    let law = SurvivalLaw::GaussianZeno { zeno, count };
    let curve = make_survival_curve(&law, p.total_time.unwrap_or_default(), cfg.points())?;
    let mut t = Table::new(vec!["time", "survival", "gaussian_limit"]);
    for &(time, s) in &curve.points {
        t.push(vec![
            time.into(),
            s.into(),
            gaussian_zeno_limit_at(time, count, zeno)?.into(),
        ]);
    }
    Ok(Outcome::table(t))
}

fn response_first(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (e, dt) = (cfg.energy(), p.delta_tau.unwrap_or_default());
    let b = response_renormalized(e, dt)?;
    let mut header = vec![
        "E",
        "delta_tau",
        "piece1",
        "piece2",
        "renormalized",
        "piecewise_total",
        "linear_coeff",
        "quadratic_coeff",
    ];
    let mut row: Vec<Cell> = vec![
        e.into(),
        dt.into(),
        b.piece1.into(),
        b.piece2.into(),
        b.renormalized.into(),
        b.piecewise_total().into(),
        b.linear_coeff.into(),
        b.quadratic_coeff.into(),
    ];
    let mut notes = Vec::new();
    if let Some(eps) = p.epsilon {
        let f1 = f1_piece(e, dt)?;
        let f2 = f2_piece(e, dt, eps)?;
        header.extend([
            "epsilon",
            "f1_regulated",
            "f2_regulated",
            "regulated_total",
            "counterterm",
        ]);
        row.extend([
            eps.into(),
            f1.into(),
            f2.into(),
            (f1 + f2).into(),
            counterterm(dt, eps).into(),
        ]);
    }
    if let Some(sigma) = p.sigma {
        let d = decay_probability_first(QubitFieldParams::new(e, sigma)?, dt)?;
        if d.marginal {
            notes.push(format!(
                "warning: transition probability {} is outside the perturbative range",
                crate::output::format_float(d.probability)
            ));
        }
        header.extend(["sigma", "probability", "survival"]);
        row.extend([sigma.into(), d.probability.into(), d.survival().into()]);
    }
    let mut t = Table::new(header);
    t.push(row);
    Ok(Outcome {
        table: t,
        notes,
        report: None,
    })
}

fn response_second(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let (e, a, dt) = (cfg.energy(), p.a.unwrap_or_default(), p.delta_tau.unwrap_or_default());
    let eps = p.epsilon.unwrap_or(DEFAULT_EPSILON_SCALE * dt);
    let kernel = p.kernel.unwrap_or_default();
    let b = response_second_total(e, FieldState::flat_band(a, 1.0)?, dt, eps, kernel.into())?;
    let mut t = Table::new(vec![
        "E",
        "a",
        "delta_tau",
        "epsilon",
        "kernel",
        "base_vacuum",
        "vacuum_part",
        "shifted_plus",
        "shifted_minus",
        "pv_part",
        "total",
        "renormalized",
        "p",
        "q",
        "small_time",
        "small_time_regime",
    ]);
    t.push(vec![
        e.into(),
        a.into(),
        dt.into(),
        eps.into(),
        match kernel {
            Kernel::Printed => "printed",
            Kernel::Integrated => "integrated",
        }
        .into(),
        b.base_vacuum.into(),
        b.vacuum_part.into(),
        b.shifted_plus.into(),
        b.shifted_minus.into(),
        b.pv_part.into(),
        b.total.into(),
        b.renormalized.into(),
        small_time_coeff_p(e, a)?.into(),
        small_time_coeff_q(e, a)?.into(),
        response_second_small_time(e, a, dt)?.into(),
        Cell::Bool(small_time_regime(e, a, dt)),
    ]);
    Ok(Outcome::table(t))
}

fn zeno_curve(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let e = cfg.energy();
    let a = p.a.unwrap_or_default();
    let total = p.total_time.unwrap_or_default();
    let qubit = QubitFieldParams::new(e, p.sigma.unwrap_or_default())?;
    let requested = p.count.map(|c| c.0).unwrap_or(MeasurementCount::Infinite);
    let state = FieldState::flat_band(a, 1.0)?;

    let sequence = |count: u64| SurvivalLaw::FlatBandSequence { qubit, state, count };
    let limit = SurvivalLaw::ContinuousLimit {
        qubit,
        a,
        count: MeasurementCount::Infinite,
    };

    if !p.landau_peierls {
        let law = match requested {
            MeasurementCount::Finite(n) => sequence(n),
            MeasurementCount::Infinite => limit,
        };
        let curve = make_survival_curve(&law, total, cfg.points())?;
        return Ok(Outcome::table(curve_table(&curve)));
    }

    let cap = landau_peierls_max_n(total, e)?;
    if cap == 0 {
        bail!("the Landau–Peierls bound N < T|E| admits no measurement for T|E| <= 1");
    }
    let used = match requested {
        MeasurementCount::Finite(n) => n.min(cap),
        MeasurementCount::Infinite => cap,
    };
    let capped = make_survival_curve(&sequence(used), total, cfg.points())?;
    let reference = make_survival_curve(&limit, total, cfg.points())?;
    let diff = capped.max_abs_diff(&reference)?;
    let mut table = curve_table(&capped);
    table.extra_meta.push((
        "landau_peierls",
        json!({ "max_n": cap, "n_used": used, "max_abs_diff_vs_limit": diff }),
    ));
    Ok(Outcome {
        table,
        notes: vec![format!(
            "landau-peierls: N capped at {used} (bound {cap}); max |S_N - S_inf| = {}",
            crate::output::format_float(diff)
        )],
        report: None,
    })
}

fn verify(cfg: &RunConfig) -> Outcome {
    let report = run_verification(cfg.params.tol);
    let notes = vec![format!(
        "verify: {} entries, {} FLAG",
        report.entries.len(),
        report.flag_count()
    )];
    Outcome {
        table: report.table(),
        notes,
        report: Some(report),
    }
}
