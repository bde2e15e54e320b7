//! Grid sweeps. Points are evaluated in parallel and emitted in grid order.

use allocgrid::rational::ratio;
use allocgrid::{
    bounds_report, classify_region, lemma1_upper_bound, optimal_symmetric, symmetric_recovery_probability,
    BoundsReport, CandidateReport, Error, ProblemInstance, Rational,
};
use rayon::prelude::*;

use crate::commands::{bounds_record, grid, region_record};
use crate::output::{Record, Report};

/// One row per budget `T`: `P_S` for every `m`, the best `m`, the averaged
/// upper bound and the region verdict.
pub(crate) fn budget(
    n: u64,
    p: &Rational,
    t_min: &Rational,
    t_max: &Rational,
    t_step: &Rational,
) -> Result<Report, Error> {
    let points = grid(t_min, t_max, t_step)?;
    // Validate every point before spending time on any of them.
    let instances = points
        .iter()
        .map(|t| ProblemInstance::new(n, p.clone(), t.clone()))
        .collect::<Result<Vec<_>, _>>()?;

    let rows = instances
        .par_iter()
        .map(|inst| {
            let t = inst.budget();
            let mut row = Record::new().exact("T", t.clone());
            for m in 1..=n {
                let ps: Rational = symmetric_recovery_probability(p, t, m)?;
                row = row.exact(&format!("ps_m{m}"), ps);
            }
            let best: CandidateReport = optimal_symmetric(inst);
            let upper: Rational = lemma1_upper_bound(inst);
            let class = classify_region(p, t)?;
            Ok(row
                .int("best_m", best.best_m)
                .exact("best_p_s", best.best_p_s)
                .exact("lemma1_upper", upper)
                .text("verdict", class.verdict.as_str()))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut report = Report::new(
        "sweep-budget",
        Record::new()
            .int("n", n)
            .exact("p", p.clone())
            .exact("t_min", t_min.clone())
            .exact("t_max", t_max.clone())
            .exact("t_step", t_step.clone()),
    );
    report.rows = rows;
    Ok(report)
}

/// One row per `(T, p)` with `T` outer and `p` inner.
pub(crate) fn region(
    t_min: &Rational,
    t_max: &Rational,
    t_step: &Rational,
    p_step: &Rational,
) -> Result<Report, Error> {
    let budgets = grid(t_min, t_max, t_step)?;
    if budgets[0] < ratio(1, 1) {
        return Err(Error::Precondition(format!("need T >= 1, got t_min = {t_min}")));
    }
    let mut ps = grid(p_step, &ratio(1, 1), p_step)?;
    ps.retain(|p| p < &ratio(1, 1));
    if ps.is_empty() {
        return Err(Error::Precondition(format!("p step {p_step} leaves no p in (0, 1)")));
    }

    let points: Vec<(Rational, Rational)> = budgets
        .iter()
        .flat_map(|t| ps.iter().map(move |p| (t.clone(), p.clone())))
        .collect();
    let rows = points
        .par_iter()
        .map(|(t, p)| {
            let class = classify_region(p, t)?;
            let key = Record::new().exact("T", t.clone()).exact("p", p.clone());
            Ok(key.extend(region_record(&class)))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut report = Report::new(
        "sweep-region",
        Record::new()
            .exact("t_min", t_min.clone())
            .exact("t_max", t_max.clone())
            .exact("t_step", t_step.clone())
            .exact("p_step", p_step.clone()),
    );
    report.rows = rows;
    Ok(report)
}

pub(crate) fn gap_asymptotics(p: &Rational, budget: &Rational, ns: &[u64]) -> Result<Report, Error> {
    if ns.is_empty() {
        return Err(Error::Precondition("n list is empty".into()));
    }
    let instances = ns
        .iter()
        .map(|&n| ProblemInstance::new(n, p.clone(), budget.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = instances
        .par_iter()
        .map(|inst| {
            let bounds: BoundsReport = bounds_report(inst);
            Record::new().int("n", inst.n()).extend(bounds_record(&bounds))
        })
        .collect();
    let mut report = Report::new(
        "gap-asymptotics",
        Record::new()
            .exact("p", p.clone())
            .exact("T", budget.clone())
            .text("n_list", ns.iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
    );
    report.rows = rows;
    Ok(report)
}
