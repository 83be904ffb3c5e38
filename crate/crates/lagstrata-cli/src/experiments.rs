//! Experiment runners. Each returns a [`Section`] with its results and assertions.

use lagstrata::chart::{
    chart_quadric, chart_subspace, graph_matrix, kernel_restriction_rank, order_record, planted_decomposable_free, vanishing_order,
    ChartPoint,
};
use lagstrata::chow::{
    chern_t_dual, connectedness_check, dimension_ledger, exceptional_coefficient, hilb3_invariants, ChowClassG36,
};
use lagstrata::chow::arithmetic::{closed_form, ledger_json, xi_dimension, LEDGER_BOUND, LG_DIMENSION};
use lagstrata::chow::pr_class;
use lagstrata::dual_k3::{
    cube_multiplicity, newsystem_dimension, phi, psi, psi_json, random_special_a, residual_search, sample_s_a_point,
    sextic_multiplicity, SpecialLagrangian, SurfacePoint, SAMPLE_ATTEMPTS,
};
use lagstrata::lagrangian::{random_graph_lagrangian, tangent_space, LagrangianFrame};
use lagstrata::strata::{census, gaussian_binomial, sample_lg1_with};
use lagstrata::{Error, Fp, Prime, Rational, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{Assertion, Section, Source};

/// The generator named in every report.
pub const RNG_NAME: &str = "rand_chacha ChaCha8 (seed_from_u64, one stream per task)";

/// An independent generator for task `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn prime(p: u32) -> std::result::Result<Prime, Error> {
    Prime::new(p)
}

pub fn degrees() -> Section {
    let mut s = Section::new();
    let run = || -> Result<[i64; 4]> {
        Ok([pr_class(1)?.degree(), pr_class(2)?.degree(), pr_class(3)?.degree(), ChowClassG36::one().degree()])
    };
    match run() {
        Ok([d1, d2, d3, g]) => {
            for (key, value, expected) in [("D1", d1, 168), ("D2", d2, 480), ("D3", d3, 720), ("degG36", g, 42)] {
                s.put(key, value);
                s.check(Assertion::equal(key, expected, value, Source::Paper));
            }
        }
        Err(e) => s.absorb("degrees", e),
    }
    match chern_t_dual() {
        Ok(c) => s.check(Assertion::equal("c1(T^dual) = 4h", ChowClassG36::h().scale(4).to_json(), c[1].to_json(), Source::Derived)),
        Err(e) => s.absorb("Chern classes", e),
    }
    s
}

pub fn connectedness() -> Section {
    let mut s = Section::new();
    match connectedness_check() {
        Ok(report) => {
            s.put("report", report.to_json());
            s.check(Assertion::equal("pr_class(2) in (h^3, h*s2, s3)", json!([16, -12, 12]), json!(report.decomposition), Source::Paper));
            s.check(Assertion::equal("integer solutions", json!([[0, 0, 0], [16, 12, 12]]), json!(report.solutions), Source::Paper));
        }
        Err(e) => s.absorb("connectedness", e),
    }
    s
}

pub fn exceptional() -> Section {
    let mut s = Section::new();
    match exceptional_coefficient() {
        Ok(report) => {
            let b = i64::try_from(&report.b).ok();
            s.put("b", b);
            s.put("details", report.to_json());
            let residual_at_minus_two = &report.x - &report.y * 4 + &report.z * 4;
            s.check(Assertion::equal("b", -2, b, Source::Paper));
            s.check(Assertion::holds("deg sigma_{8,10} != 0", report.sigma_factor_degree != 0.into(), Source::Paper));
            s.check(Assertion::holds("X - 4Y + 4Z = 0 (b = -2 solves the relation)", residual_at_minus_two == 0.into(), Source::Derived));
            s.check(Assertion::holds("X - 4Z != 0 (b = 2 does not)", report.residual_at_plus_two != 0.into(), Source::Derived));
            s.check(Assertion::holds("c1^2 = 2 c2", report.c1_squared_is_2c2, Source::Derived));
            s.check(Assertion::holds("c2^2 = 2(c1 c3 - c4)", report.c2_squared_relation, Source::Derived));
        }
        Err(e) => s.absorb("exceptional coefficient", e),
    }
    s
}

pub fn ledger() -> Section {
    let mut s = Section::new();
    s.put("ledger", ledger_json());
    for row in dimension_ledger() {
        let label = format!("i={} d={}", row.i, row.d);
        s.check(Assertion::equal(format!("{label} family dimension"), closed_form(row.i, row.d), row.family, Source::Paper));
        s.check(Assertion::holds(format!("{label} total {} <= {LEDGER_BOUND}", row.total()), row.within_bound(), Source::Paper));
    }
    s.check(Assertion::equal("dim Xi", 54, xi_dimension(), Source::Paper));
    s.check(Assertion::holds("dim Xi < dim LG(10,20)", xi_dimension() < LG_DIMENSION, Source::Paper));
    s
}

pub fn invariants() -> Section {
    let mut s = Section::new();
    let x = hilb3_invariants(6, 2, 3);
    s.put("class_2H_minus_3delta", x.to_json());
    s.check(Assertion::equal("q(2H - 3 delta)", 4, x.q, Source::Paper));
    s.check(Assertion::equal("Fujiki degree", 960, x.fujiki_degree, Source::Paper));
    s
}

/// Census of a seeded random graph Lagrangian; the total must be the Gaussian binomial.
pub fn census_random(p: u32, seed: u64) -> Section {
    let mut s = Section::new();
    let run = || -> Result<Value> {
        let field = prime(p)?;
        let frame = LagrangianFrame::<Fp>::canonical(field);
        let a = random_graph_lagrangian(&frame, &mut stream_rng(seed, 0));
        let report = census(&a)?;
        Ok(json!({"census": report.to_json(), "total": report.total, "sum": report.counts.iter().sum::<u64>()}))
    };
    match run() {
        Ok(v) => {
            let expected = gaussian_binomial(6, 3, p as u64) as u64;
            s.check(Assertion::equal(format!("census total over F_{p}"), expected, v["total"].clone(), Source::Derived));
            s.check(Assertion::equal("counts sum to the total", v["total"].clone(), v["sum"].clone(), Source::Trivial));
            s.put("result", v);
        }
        Err(e) => s.absorb("census", e),
    }
    s
}

/// Expected log_p of the size of D_k: 9 − k(k+1)/2.
pub fn expected_log_count(k: usize) -> f64 {
    9.0 - (k * (k + 1) / 2) as f64
}

pub const BAND: f64 = 1.5;
pub const LG1_ATTEMPTS: usize = 50;

/// Census of sampled A ∈ LG¹(F_p): no point of D_4, and D_1, D_2 of the expected size.
pub fn census_lg1(p: u32, seed: u64, samples: usize) -> Section {
    let mut s = Section::new();
    let field = match prime(p) {
        Ok(f) => f,
        Err(e) => {
            s.absorb("census", e);
            return s;
        }
    };
    let mut records = Vec::new();
    for sample in 0..samples {
        let mut rng = stream_rng(seed, sample as u64);
        match sample_lg1_with(field, &mut rng, LG1_ATTEMPTS) {
            Ok(found) => {
                let report = &found.screen.census;
                s.check(Assertion::equal(format!("sample {sample}: count(k >= 4)"), 0, report.count_at_least(4), Source::Paper));
                let mut logs = Vec::new();
                for k in 1..=2 {
                    let count = report.count_at_least(k);
                    let log = if count > 0 { (count as f64).ln() / (p as f64).ln() } else { f64::NEG_INFINITY };
                    let centre = expected_log_count(k);
                    s.check(Assertion::holds(
                        format!("sample {sample}: log_{p} count(k >= {k}) = {log:.3} within {centre} +/- {BAND}"),
                        (log - centre).abs() <= BAND,
                        Source::Paper,
                    ));
                    logs.push(json!({"k": k, "count": count, "log_p": log, "expected": centre}));
                }
                records.push(json!({"sample": sample, "attempts": found.attempts, "census": report.to_json(), "bands": logs}));
            }
            Err(e) => s.absorb(&format!("LG1 sample {sample}"), e),
        }
    }
    s.put("samples", records);
    s
}

/// chart_quadric(B) against the graph of T_{U_B}, over ℚ and F_101.
pub fn chart_identity(trials: usize, seed: u64) -> Section {
    let mut s = Section::new();
    let mut rng = stream_rng(seed, 0);
    let mut rational_failures = 0usize;
    let mut prime_failures = 0usize;
    let field = Prime::new(101).expect("101 is prime");
    let mut errors = Vec::new();
    for _ in 0..trials {
        let b = ChartPoint::<Rational>::random((), &mut rng);
        match graph_matrix(&tangent_space(&chart_subspace((), &b)).expect("tangent space")) {
            Ok(direct) => rational_failures += usize::from(direct != chart_quadric((), &b)),
            Err(e) => errors.push(e),
        }
        let b = ChartPoint::<Fp>::random(field, &mut rng);
        match graph_matrix(&tangent_space(&chart_subspace(field, &b)).expect("tangent space")) {
            Ok(direct) => prime_failures += usize::from(direct != chart_quadric(field, &b)),
            Err(e) => errors.push(e),
        }
    }
    s.put("trials_per_field", trials);
    s.put("failures_rational", rational_failures);
    s.put("failures_f101", prime_failures);
    s.check(Assertion::equal("chart identity failures over Q", 0, rational_failures, Source::Paper));
    s.check(Assertion::equal("chart identity failures over F_101", 0, prime_failures, Source::Paper));
    for e in errors {
        s.absorb("graph of T_U", e);
    }
    s
}

pub const PLANT_ATTEMPTS: usize = 20;

/// Vanishing orders k − ℓ + 1 of the local equations of D_ℓ at a point of D_k.
pub fn tangent_cone(directions: usize, seed: u64) -> Section {
    let mut s = Section::new();
    let field = Prime::new(101).expect("101 is prime");
    let mut rng = stream_rng(seed, 0);
    let mut records = Vec::new();
    for k in 2..=3usize {
        let a = match planted_decomposable_free::<Fp, _>(field, k, &mut rng, PLANT_ATTEMPTS) {
            Ok(a) => a,
            Err(e) => {
                s.absorb(&format!("planting k={k}"), e);
                continue;
            }
        };
        for level in 1..=k {
            let expected = k - level + 1;
            let mut failures = 0;
            for _ in 0..directions {
                let direction = ChartPoint::<Fp>::random(field, &mut rng);
                match vanishing_order(&a, level, &direction, 10) {
                    Ok(order) => {
                        failures += usize::from(order != expected);
                        records.push(order_record(k, level, order));
                    }
                    Err(_) => failures += 1,
                }
            }
            s.check(Assertion::equal(format!("k={k} l={level}: directions with order != {expected}"), 0, failures, Source::Paper));
        }
    }
    s.put("orders", records);
    s
}

/// Rank of the restriction of chart quadrics to K for planted rank-7 configurations.
pub fn restriction(configurations: usize, seed: u64) -> Section {
    let mut s = Section::new();
    let field = Prime::new(101).expect("101 is prime");
    let mut rng = stream_rng(seed, 0);
    let mut ranks = Vec::new();
    for _ in 0..configurations {
        match planted_decomposable_free::<Fp, _>(field, 3, &mut rng, PLANT_ATTEMPTS).and_then(|a| kernel_restriction_rank(&a, &mut rng)) {
            Ok(rank) => ranks.push(rank),
            Err(e) => s.absorb("restriction rank", e),
        }
    }
    let failures = ranks.iter().filter(|&&r| r != 6).count();
    s.put("restriction_ranks", ranks);
    s.check(Assertion::equal("configurations with restriction rank != 6", 0, failures, Source::Paper));
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualExperiment {
    Phi,
    Psi,
    NewSystem,
    Residual,
}

impl DualExperiment {
    pub const ALL: [DualExperiment; 4] = [DualExperiment::Phi, DualExperiment::Psi, DualExperiment::NewSystem, DualExperiment::Residual];

    pub fn name(self) -> &'static str {
        match self {
            DualExperiment::Phi => "phi",
            DualExperiment::Psi => "psi",
            DualExperiment::NewSystem => "newsystem",
            DualExperiment::Residual => "residual",
        }
    }

    pub fn parse(name: &str) -> Option<Vec<DualExperiment>> {
        match name {
            "all" => Some(DualExperiment::ALL.to_vec()),
            _ => DualExperiment::ALL.iter().copied().find(|e| e.name() == name).map(|e| vec![e]),
        }
    }

    fn stream_base(self) -> u64 {
        (DualExperiment::ALL.iter().position(|e| *e == self).expect("listed") as u64 + 1) << 32
    }
}

/// Redraws of a configuration that turned out non-generic, per trial.
pub const TRIAL_RETRIES: usize = 10;
/// Configurations tried per residual trial before giving up on a split cubic.
pub const RESIDUAL_BUDGET: usize = 40;
pub const RESIDUAL_SUCCESSES: usize = 20;

fn sample_points(data: &SpecialLagrangian, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<SurfacePoint>> {
    (0..n).map(|_| sample_s_a_point(data, rng, SAMPLE_ATTEMPTS).map(|(pt, _)| pt)).collect()
}

/// Runs `attempt` on fresh configurations until it is defined; returns the value and the
/// number of discarded (non-generic) configurations.
fn retrying<T>(mut attempt: impl FnMut() -> Result<T>) -> Result<(T, usize)> {
    for retries in 0..TRIAL_RETRIES {
        match attempt() {
            Ok(value) => return Ok((value, retries)),
            Err(Error::Precondition(_) | Error::Degenerate(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::RetriesExhausted(TRIAL_RETRIES))
}

fn coords(v: &[Fp]) -> Value {
    Value::from(v.iter().map(|x| x.value()).collect::<Vec<_>>())
}

fn trial(data: &SpecialLagrangian, experiment: DualExperiment, rng: &mut ChaCha8Rng) -> Result<Value> {
    match experiment {
        DualExperiment::Phi => {
            let ((w, symmetric), retries) = retrying(|| {
                let pts = sample_points(data, rng, 2)?;
                let w = phi(data, &pts[0], &pts[1])?;
                let symmetric = w == phi(data, &pts[1], &pts[0])?;
                Ok((w, symmetric))
            })?;
            Ok(json!({"retries": retries, "phi": coords(&w), "symmetric": symmetric, "multiplicity": sextic_multiplicity(data, &w)?}))
        }
        DualExperiment::Psi => {
            let (result, retries) = retrying(|| {
                let pts = sample_points(data, rng, 3)?;
                psi(data, [&pts[0], &pts[1], &pts[2]])
            })?;
            let stratum = cube_multiplicity(data, &result.via_phi)?;
            Ok(json!({"retries": retries, "psi": psi_json(&result), "agree": result.agree(), "stratum": stratum}))
        }
        DualExperiment::NewSystem => {
            let (report, retries) = retrying(|| {
                let pts = sample_points(data, rng, 3)?;
                newsystem_dimension(data, [&pts[0], &pts[1], &pts[2]])
            })?;
            let mut v = report.to_json();
            v["retries"] = retries.into();
            Ok(v)
        }
        DualExperiment::Residual => {
            let search = residual_search(data, rng, RESIDUAL_BUDGET)?;
            let mut record = json!({"configurations": search.configurations, "coincident": search.coincident});
            match search.found {
                Some((betas, triple)) => {
                    record["found"] = true.into();
                    record["betas"] = betas.iter().map(|b| coords(b.beta())).collect::<Vec<_>>().into();
                    record["same_psi"] = triple.same_psi.into();
                    record["distinct"] = triple.distinct.into();
                    record["triple"] = triple.to_json();
                }
                None => record["found"] = false.into(),
            }
            Ok(record)
        }
    }
}

fn summarize(s: &mut Section, experiment: DualExperiment, records: &[Value]) {
    let count = |pred: &dyn Fn(&Value) -> bool| records.iter().filter(|r| pred(r)).count();
    let n = records.len();
    match experiment {
        DualExperiment::Phi => {
            s.check(Assertion::equal("trials with dim(A ∩ F_[phi]) = 1", n, count(&|r| r["multiplicity"] == 1), Source::Derived));
            s.check(Assertion::equal("trials with phi symmetric", n, count(&|r| r["symmetric"] == true), Source::Trivial));
        }
        DualExperiment::Psi => {
            s.check(Assertion::equal("trials with stratum(A, psi) = 2", n, count(&|r| r["stratum"] == 2), Source::Paper));
            s.check(Assertion::equal("trials where both psi computations agree", n, count(&|r| r["agree"] == true), Source::Paper));
        }
        DualExperiment::NewSystem => {
            s.check(Assertion::equal("trials with newsystem rank 4", n, count(&|r| r["rank"] == 4), Source::Paper));
            s.check(Assertion::equal("trials with solution dimension 2", n, count(&|r| r["solution_dim"] == 2), Source::Paper));
            s.check(Assertion::equal("trials where x = 0 forces the zero solution", n, count(&|r| r["x_nonzero"] == true), Source::Paper));
            s.check(Assertion::equal("trials where solutions span A ∩ T_psi", n, count(&|r| r["matches_tangent_meet"] == true), Source::Derived));
            s.check(Assertion::equal("trials with phi in normal form", n, count(&|r| r["phi_normal_form"] == true), Source::Paper));
        }
        DualExperiment::Residual => {
            let found = count(&|r| r["found"] == true);
            let good = count(&|r| r["found"] == true && r["same_psi"] == true && r["distinct"] == true);
            s.put("successes", found);
            s.put("coincident_configurations", records.iter().map(|r| r["coincident"].as_u64().unwrap_or(0)).sum::<u64>());
            s.check(Assertion::holds(format!("at least {RESIDUAL_SUCCESSES} residual triples found ({found})"), found >= RESIDUAL_SUCCESSES, Source::Paper));
            s.check(Assertion::equal("found triples with psi(beta) = psi(gamma) and six distinct parameters", found, good, Source::Paper));
        }
    }
}

/// The dual-K3 suite: one special A from stream 0, then independent trials in parallel.
pub fn dual_k3(p: u32, seed: u64, experiments: &[DualExperiment], trials: usize) -> Section {
    let mut s = Section::new();
    let data = match prime(p).and_then(|field| random_special_a(field, &mut stream_rng(seed, 0), 50)) {
        Ok(d) => d,
        Err(e) => {
            s.absorb("building the special Lagrangian", e);
            return s;
        }
    };
    s.put("A", data.to_json());
    for &experiment in experiments {
        let mut section = Section::new();
        let outcomes: Vec<Result<Value>> = (0..trials)
            .into_par_iter()
            .map(|i| trial(&data, experiment, &mut stream_rng(seed, experiment.stream_base() + i as u64)))
            .collect();
        let mut records = Vec::with_capacity(trials);
        for (i, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok(mut record) => {
                    record["trial"] = i.into();
                    records.push(record);
                }
                Err(e) => section.absorb(&format!("trial {i}"), e),
            }
        }
        summarize(&mut section, experiment, &records);
        section.put("trials", records);
        s.nest(experiment.name(), section);
    }
    s
}
