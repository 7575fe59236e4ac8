use mixlit::approx::{enumerate_solutions, running_liminf, DEFAULT_SCAN_CAP, SOLUTION_CSV_HEADER};
use mixlit::criteria::{
    generator_density_floor, linear_growth_ratio, mean_element_density, mean_product_density, mean_product_fill,
    sandwich_sweep, tuple_density_floor, weighted_partial_sum, Counter, SeriesRow, SERIES_CSV_HEADER,
};
use mixlit::measure::{monte_carlo_hits, union_range, MonteCarloReport, MONTE_CARLO_CSV_HEADER};
use mixlit::psi::Verdict;
use mixlit::scalar::ratio_to_f64;
use mixlit::text::{format_float, format_rational};
use mixlit::{BigRational, Budget};
use serde::Serialize;
use serde_json::json;

use crate::config::{psi_from, ExperimentConfig, MAX_MEASURE_WIDTH, MAX_SAMPLES};
use crate::error::CliError;
use crate::output::Sink;

#[derive(Serialize)]
struct NormRow {
    n: u64,
    sequence: String,
    index: usize,
    element: u64,
    value: String,
    capital_m: usize,
    frak_m: String,
}

pub fn norm(config: &ExperimentConfig) -> Result<(), CliError> {
    let n = config.require(config.n, "n")?;
    if n == 0 {
        return Err(CliError::Config("n must be positive".into()));
    }
    let family = config.family()?;
    let mut rows = Vec::new();
    for seq in family.members() {
        let norm = seq.pseudo_norm(n)?;
        rows.push(NormRow {
            n,
            sequence: seq.spec().to_string(),
            index: norm.index,
            element: norm.element,
            value: format_rational(&norm.value()),
            capital_m: seq.capital_m(n)?,
            frak_m: format_rational(&seq.frak_m(n)?),
        });
    }
    let mut csv = String::from("n,sequence,index,element,value,capital_m,frak_m\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.sequence, r.index, r.element, r.value, r.capital_m, r.frak_m
        ));
    }
    Sink::new("norm", config).emit(&[], &csv, &rows)
}

#[derive(Serialize)]
struct SeriesOut {
    weight: String,
    psi: String,
    family: String,
    n_start: u64,
    n_end: u64,
    exact: bool,
    abs_err: f64,
    analytic_verdict: Verdict,
    rows: Vec<SeriesRow>,
}

/// Partial sums only. The analytic verdict, where the family table has one,
/// is printed beside them; nothing is concluded from the numbers.
pub fn series(config: &ExperimentConfig, budget: &Budget) -> Result<(), CliError> {
    let (n0, n1) = config.range()?;
    let psi = psi_from(config.psi()?, n0)?;
    let weights = config.weights()?;
    let mut outs = Vec::new();
    for weight in &weights {
        let verdict = psi.analytic_verdict(weight);
        let out = if psi.is_exact() && weight.is_exact() {
            let rep = weighted_partial_sum::<BigRational>(&psi, weight, n1, budget)?;
            (rep.rows(), rep.is_exact(), rep.abs_err)
        } else {
            let rep = weighted_partial_sum::<f64>(&psi, weight, n1, budget)?;
            (rep.rows(), false, rep.abs_err)
        };
        outs.push(SeriesOut {
            weight: weight.to_string(),
            psi: psi.label(),
            family: weight.family_label(),
            n_start: n0,
            n_end: n1,
            exact: out.1,
            abs_err: out.2,
            analytic_verdict: verdict,
            rows: out.0,
        });
    }
    let notes: Vec<String> = outs
        .iter()
        .map(|o| {
            format!(
                "weight={} psi={} family={} analytic_verdict={} abs_err={}",
                o.weight,
                o.psi,
                o.family,
                o.analytic_verdict,
                format_float(o.abs_err)
            )
        })
        .collect();
    let mut csv = format!("{SERIES_CSV_HEADER}\n");
    for o in &outs {
        for r in &o.rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.weight,
                r.psi,
                r.family,
                r.n_end,
                r.partial_sum_exact.as_deref().unwrap_or(""),
                r.partial_sum_float
            ));
        }
    }
    Sink::new("series", config).emit(&notes, &csv, &outs)
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    subject: String,
    value: String,
    detail: String,
}

impl CheckRow {
    fn new(
        check: &'static str,
        subject: impl Into<String>,
        value: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            check,
            subject: subject.into(),
            value: value.into(),
            detail: detail.into(),
        }
    }
}

fn rationals(v: &[BigRational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

/// Finite-range measurements of the hypotheses on the configured family.
pub fn criteria(config: &ExperimentConfig) -> Result<(), CliError> {
    let n_max = config.require(config.n_max, "n_max")?;
    if n_max < 2 {
        return Err(CliError::Config("n_max must be at least 2".into()));
    }
    let k_max = config.k_max.unwrap_or(12);
    let family = config.family()?;
    let label = family.label();
    let coprime = family.is_mutually_coprime();
    let mut rows = vec![
        CheckRow::new("mutually_coprime", &label, coprime.to_string(), ""),
        CheckRow::new(
            "generator_density_floor",
            &label,
            format_rational(&generator_density_floor(&family)),
            "",
        ),
    ];
    let tuples = tuple_density_floor(&family, k_max)?;
    rows.push(CheckRow::new(
        "tuple_density_floor",
        &label,
        format_rational(&tuples.min_ratio),
        format!(
            "k_max={} argmin={} still_decreasing={} trend={}",
            tuples.bound,
            tuples.argmin.iter().map(usize::to_string).collect::<Vec<_>>().join(":"),
            tuples.decreasing_at_boundary,
            rationals(&tuples.trend)
        ),
    ));
    for seq in family.members() {
        let spec = seq.spec().to_string();
        let dens = mean_element_density(seq, k_max.max(1))?;
        rows.push(CheckRow::new(
            "mean_element_density",
            &spec,
            format_rational(&dens.ratio),
            format!("m={} decaying={}", k_max.max(1), dens.is_decaying()),
        ));
        let growth = linear_growth_ratio(&Counter::FrakM(seq.clone()), n_max)?;
        rows.push(CheckRow::new(
            "frak_m_growth_ratio",
            &spec,
            format_rational(&growth.ratio),
            format!("N={n_max} approx={}", format_float(growth.value)),
        ));
    }
    if coprime {
        let density = mean_product_density(&family, n_max)?;
        rows.push(CheckRow::new(
            "mean_product_density",
            &label,
            format_rational(&density),
            format!("N={n_max}"),
        ));
        let fill = mean_product_fill(&family, n_max)?;
        rows.push(CheckRow::new(
            "mean_product_fill",
            &label,
            format_rational(&fill),
            format!("N={n_max}"),
        ));
        let growth = linear_growth_ratio(&Counter::MultiCount(family.clone()), n_max)?;
        rows.push(CheckRow::new(
            "multi_count_growth_ratio",
            &label,
            format_rational(&growth.ratio),
            format!("N={n_max} approx={}", format_float(growth.value)),
        ));
        let sweep = sandwich_sweep(&family, n_max)?;
        let shown: Vec<String> = sweep.upper_failures.iter().take(20).map(u64::to_string).collect();
        rows.push(CheckRow::new(
            "sandwich_upper_failures",
            &label,
            sweep.upper_failures.len().to_string(),
            format!("n={}", shown.join(" ")),
        ));
        if let Some((min, at)) = &sweep.min_ratio {
            rows.push(CheckRow::new(
                "sandwich_min_ratio",
                &label,
                format_rational(min),
                format!("n={at} approx={}", format_float(ratio_to_f64(min))),
            ));
        }
    }
    if config.psi.is_some() {
        let psi = config.psi()?;
        let rep = psi.check_monotone(psi.start_index(), n_max)?;
        rows.push(CheckRow::new(
            "psi_non_increasing",
            psi.label(),
            rep.is_decreasing().to_string(),
            format!("violations={} uncertain={}", rep.violations.len(), rep.uncertain.len()),
        ));
    }
    let mut csv = String::from("check,subject,value,detail\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.check, r.subject, r.value, r.detail));
    }
    Sink::new("criteria", config).emit(&[], &csv, &rows)
}

pub fn solutions(config: &ExperimentConfig) -> Result<(), CliError> {
    let n_max = config.require(config.n_max, "n_max")?;
    let psi = config.psi()?;
    let family = mixlit::pseudo_norm::SequenceFamily::from_specs(&config.sequences)?;
    let mut notes = Vec::new();
    let mut csv = format!("alpha,{SOLUTION_CSV_HEADER}\n");
    let mut data = Vec::new();
    for alpha in config.alphas()? {
        let scan = enumerate_solutions(alpha, &psi, &family, n_max)?;
        notes.push(format!(
            "alpha={} solutions={} indeterminate={}",
            alpha.label(),
            scan.count(),
            scan.indeterminate_count()
        ));
        for rec in &scan.records {
            csv.push_str(&format!("{},{}\n", alpha.label(), rec.csv_row()));
        }
        data.push(json!({ "alpha": alpha, "scan": scan }));
    }
    Sink::new("solutions", config).emit(&notes, &csv, &data)
}

pub fn liminf(config: &ExperimentConfig) -> Result<(), CliError> {
    let n_max = config.require(config.n_max, "n_max")?;
    let eps = config.epsilon()?;
    let seq = config
        .family()?
        .members()
        .first()
        .cloned()
        .expect("family() rejects empty lists");
    let cap = config.scan_cap.unwrap_or(DEFAULT_SCAN_CAP);
    let mut notes = Vec::new();
    let mut csv = String::from("alpha,n,running_min\n");
    let mut data = Vec::new();
    for alpha in config.alphas()? {
        let trace = running_liminf(alpha, &seq, &eps, n_max, cap)?;
        let undecided = trace.checkpoints.iter().filter(|c| c.indeterminate).count();
        notes.push(format!(
            "alpha={} sequence={} epsilon={} argmin={} indeterminate_checkpoints={undecided}",
            alpha.label(),
            seq.spec(),
            format_rational(&eps),
            trace.argmin
        ));
        for c in &trace.checkpoints {
            csv.push_str(&format!("{},{},{}\n", alpha.label(), c.n, format_float(c.running_min)));
        }
        data.push(json!({ "alpha": alpha, "trace": trace }));
    }
    Sink::new("liminf", config).emit(&notes, &csv, &data)
}

pub fn measure(config: &ExperimentConfig) -> Result<(), CliError> {
    let (n0, n1) = config.range()?;
    if n1 - n0 >= MAX_MEASURE_WIDTH {
        return Err(CliError::Config(format!(
            "range {n0}..={n1} is wider than {MAX_MEASURE_WIDTH}"
        )));
    }
    let psi = config.psi()?;
    let family = mixlit::pseudo_norm::SequenceFamily::from_specs(&config.sequences)?;
    let union = union_range(&psi, &family, n0, n1)?;
    let sink = Sink::new("measure", config);
    match config.samples {
        Some(samples) => {
            if samples > MAX_SAMPLES {
                return Err(CliError::Config(format!("samples = {samples} exceeds {MAX_SAMPLES}")));
            }
            let seed = config.seed()?;
            let hits = monte_carlo_hits(&union.set, samples, seed)?;
            let rep = MonteCarloReport {
                n0,
                n1,
                hits,
                tail_sum: ratio_to_f64(&union.tail_sum),
                union_measure: ratio_to_f64(&union.measure),
            };
            let notes = vec![format!(
                "within_bound={} exact_tail_sum={} exact_union_measure={}",
                rep.within_bound(),
                format_rational(&union.tail_sum),
                format_rational(&union.measure)
            )];
            let csv = format!("{MONTE_CARLO_CSV_HEADER}\n{}\n", rep.csv_row());
            sink.emit(&notes, &csv, &json!({ "union": union, "monte_carlo": rep }))
        }
        None => {
            let csv = format!(
                "N0,N1,tail_sum,bound_sum,union_measure,intervals\n{},{},{},{},{},{}\n",
                n0,
                n1,
                format_rational(&union.tail_sum),
                format_rational(&union.bound_sum),
                format_rational(&union.measure),
                union.set.len()
            );
            sink.emit(&[], &csv, &json!({ "union": union }))
        }
    }
}
