use allocgrid::allocation::recovery_threshold;
use allocgrid::oracle::default_quantum;
use allocgrid::rational::ratio;
use allocgrid::{
    bounds_report, brute_force_best, classify_region, exhaustive_symmetric, lemma1_upper_bound, monte_carlo_estimate,
    optimal_symmetric, recovery_probability_dp, recovery_probability_enum, Allocation, BoundsReport, CandidateReport,
    Error, ProblemInstance, Rational, RegionClass,
};

use crate::output::{Format, Record, Report};
use crate::{max_enum, sweep, Command};

pub(crate) fn dispatch(command: Command) -> Result<(Report, Format), Error> {
    match command {
        Command::Eval {
            instance,
            alloc,
            enumerate,
            format,
        } => Ok((eval(&instance.instance()?, &alloc, enumerate)?, format.format())),
        Command::Symmetric {
            instance,
            exhaustive,
            format,
        } => Ok((symmetric(&instance.instance()?, exhaustive), format.format())),
        Command::Bounds { instance, format } => Ok((bounds(&instance.instance()?), format.format())),
        Command::Region { p, budget, format } => Ok((region(&p, &budget)?, format.format())),
        Command::Search { instance, q, format } => Ok((search(&instance.instance()?, q)?, format.format())),
        Command::Mc {
            instance,
            alloc,
            trials,
            seed,
            format,
        } => Ok((mc(&instance.instance()?, &alloc, trials, seed)?, format.format())),
        Command::SweepBudget {
            n,
            p,
            t_min,
            t_max,
            t_step,
            format,
        } => {
            let t_max = t_max.unwrap_or_else(|| Rational::from_integer(n.into()));
            Ok((sweep::budget(n, &p, &t_min, &t_max, &t_step)?, format.format()))
        }
        Command::SweepRegion {
            t_min,
            t_max,
            t_step,
            p_step,
            format,
        } => Ok((sweep::region(&t_min, &t_max, &t_step, &p_step)?, format.format())),
        Command::GapAsymptotics {
            p,
            budget,
            n_list,
            format,
        } => Ok((sweep::gap_asymptotics(&p, &budget, &n_list)?, format.format())),
    }
}

pub(crate) fn instance_params(instance: &ProblemInstance) -> Record {
    Record::new()
        .int("n", instance.n())
        .exact("p", instance.p().clone())
        .exact("T", instance.budget().clone())
}

fn eval(instance: &ProblemInstance, text: &str, enumerate: bool) -> Result<Report, Error> {
    let alloc = Allocation::parse(text, Some(instance.n()))?;
    let value: Rational = if enumerate {
        recovery_probability_enum(instance, &alloc)?
    } else {
        recovery_probability_dp(instance, &alloc)?
    };
    let mut report = Report::new("eval", instance_params(instance).text("alloc", allocation_text(&alloc)));
    report.summary = Record::new()
        .exact("recovery_probability", value)
        .text("method", if enumerate { "enumeration" } else { "dp" });
    Ok(report)
}

fn symmetric(instance: &ProblemInstance, exhaustive: bool) -> Report {
    let result: CandidateReport = if exhaustive {
        exhaustive_symmetric(instance)
    } else {
        optimal_symmetric(instance)
    };
    let tied = result.argmax();
    let mut report = Report::new(
        "symmetric",
        instance_params(instance).text("scan", if exhaustive { "all" } else { "candidates" }),
    );
    report.summary = Record::new()
        .int("best_m", result.best_m)
        .exact("best_p_s", result.best_p_s.clone())
        .text("argmax", join(&tied));
    report.rows = result
        .candidates
        .iter()
        .map(|(m, ps)| {
            Record::new()
                .int("m", *m)
                .int("threshold", recovery_threshold(instance.budget(), *m))
                .exact("p_s", ps.clone())
                .flag("best", tied.contains(m))
        })
        .collect();
    report
}

pub(crate) fn bounds_record(report: &BoundsReport) -> Record {
    Record::new()
        .exact("lemma1_upper", report.lemma1_upper.clone())
        .exact("spread_all_p_s", report.spread_all_p_s.clone())
        .exact("theorem1_gap", report.theorem1_gap.clone())
        .float("chernoff_envelope", report.chernoff_envelope)
        .exact("markov_cap", report.markov_cap.clone())
}

fn bounds(instance: &ProblemInstance) -> Report {
    let mut report = Report::new("bounds", instance_params(instance));
    report.summary = bounds_record(&bounds_report(instance));
    report
}

pub(crate) fn region_record(class: &RegionClass) -> Record {
    let f = class.flags;
    Record::new()
        .text("verdict", class.verdict.as_str())
        .flag("theorem2", f.theorem2)
        .flag("theorem3", f.theorem3)
        .flag("lemma2", f.lemma2)
        .flag("lemma3_eq", f.lemma3_eq)
        .flag("lemma3_ineq", f.lemma3_ineq)
        .flag("lemma4", f.lemma4)
}

fn region(p: &Rational, budget: &Rational) -> Result<Report, Error> {
    let class = classify_region(p, budget)?;
    let mut report = Report::new("region", Record::new().exact("p", p.clone()).exact("T", budget.clone()));
    report.summary = region_record(&class);
    Ok(report)
}

fn search(instance: &ProblemInstance, q: Option<u64>) -> Result<Report, Error> {
    let q = q.unwrap_or_else(|| default_quantum(instance));
    let result = brute_force_best(instance, q, max_enum()?)?;
    let sym: CandidateReport = exhaustive_symmetric(instance);
    let upper: Rational = lemma1_upper_bound(instance);
    let mut report = Report::new("search", instance_params(instance).int("q", q));
    report.summary = Record::new()
        .text("best_allocation", allocation_text(&result.best_allocation))
        .exact("best_probability", result.best_probability)
        .int("allocations_evaluated", result.allocations_evaluated)
        .int("symmetric_best_m", sym.best_m)
        .exact("symmetric_best_p_s", sym.best_p_s)
        .exact("lemma1_upper", upper);
    Ok(report)
}

fn mc(instance: &ProblemInstance, text: &str, trials: u64, seed: u64) -> Result<Report, Error> {
    let alloc = Allocation::parse(text, Some(instance.n()))?;
    let est = monte_carlo_estimate(instance, &alloc, trials, seed)?;
    let exact: Rational = recovery_probability_dp(instance, &alloc)?;
    let deviation = (est.estimate - allocgrid::rational::to_f64(&exact)).abs();
    let mut report = Report::new(
        "mc",
        instance_params(instance)
            .text("alloc", allocation_text(&alloc))
            .int("trials", trials)
            .int("seed", seed),
    );
    report.summary = Record::new()
        .float("estimate", Some(est.estimate))
        .float("standard_error", Some(est.standard_error))
        .exact("exact", exact)
        .float(
            "z_score",
            Some(if est.standard_error > 0.0 {
                deviation / est.standard_error
            } else {
                0.0
            }),
        )
        .text("generator", est.generator);
    Ok(report)
}

fn allocation_text(alloc: &Allocation) -> String {
    alloc
        .amounts()
        .iter()
        .map(Rational::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn join(ms: &[u64]) -> String {
    ms.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Exact grid `start, start+step, ...` up to and including `end`.
pub(crate) fn grid(start: &Rational, end: &Rational, step: &Rational) -> Result<Vec<Rational>, Error> {
    if step <= &ratio(0, 1) {
        return Err(Error::Precondition(format!("step must be positive, got {step}")));
    }
    if start > end {
        return Err(Error::Precondition(format!("empty range: {start} > {end}")));
    }
    let mut points = Vec::new();
    let mut x = start.clone();
    while &x <= end {
        points.push(x.clone());
        x += step;
    }
    Ok(points)
}
