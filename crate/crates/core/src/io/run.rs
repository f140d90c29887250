use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::model::ModelFile;
use super::record::{Record, ResultRecord};
use crate::algebra::{BoolOrAnd, Count, MinPlus, Ring, Scaled, Semiring, SemiringKind, SumProduct};
use crate::error::{Error, Result};
use crate::general::{infer_basic, infer_fast};
use crate::map::{check_nonpositive, map_nonpositive, MapOptions};
use crate::oracle::{brute_force_map, brute_force_marginals, brute_force_partition, brute_force_z};
use crate::pattern::{build_pattern_system, compute_bank_stats, PatternBank, Variant};
use crate::ring::{marginals, partition_function};
use crate::sampling::{Sampler, SamplerMode};

/// Largest model `check` will enumerate.
pub const CHECK_LIMIT: f64 = 65536.0;
/// Relative tolerance of `check` comparisons.
pub const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Partition,
    Map,
    Marginals,
    Sample,
    Stats,
    Check,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Partition, Command::Map, Command::Marginals, Command::Sample, Command::Stats, Command::Check];

    pub fn name(self) -> &'static str {
        match self {
            Command::Partition => "partition",
            Command::Map => "map",
            Command::Marginals => "marginals",
            Command::Sample => "sample",
            Command::Stats => "stats",
            Command::Check => "check",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command {s:?}"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Algorithm {
    #[default]
    Auto,
    /// Ring message passing.
    Alg1,
    /// Extended-layer recursion.
    Alg4,
    /// Special-pattern recursion.
    Alg5,
    /// Non-positive MAP.
    Alg6,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg4 => "alg4",
            Algorithm::Alg5 => "alg5",
            Algorithm::Alg6 => "alg6",
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Algorithm::Auto, Algorithm::Alg1, Algorithm::Alg4, Algorithm::Alg5, Algorithm::Alg6]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub count: usize,
    pub algorithm: Algorithm,
    pub fft: bool,
    pub exact_pi_tilde: bool,
    pub delta: usize,
    pub sampler: SamplerMode,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            count: 1,
            algorithm: Algorithm::Auto,
            fft: false,
            exact_pi_tilde: false,
            delta: 1,
            sampler: SamplerMode::Direct,
            timing: false,
        }
    }
}

impl RunOptions {
    fn map_options(&self) -> MapOptions {
        MapOptions { exact: self.exact_pi_tilde, fft: self.fft, delta: self.delta }
    }
}

fn mismatch(alg: Algorithm, semiring: &str, reason: &str) -> Error {
    Error::AlgorithmMismatch { algorithm: alg.name().into(), semiring: semiring.into(), reason: reason.into() }
}

type Bits = Count<i128>;

/// Printable form of a `Z` value.
trait Report {
    fn add_to(&self, r: Record) -> Record;
}

impl Report for Scaled<SumProduct<f64>> {
    fn add_to(&self, r: Record) -> Record {
        r.float("z", self.to_float()).float("log_z", self.ln())
    }
}

impl Report for Scaled<MinPlus<f64>> {
    fn add_to(&self, r: Record) -> Record {
        r.float("z", self.value.0)
    }
}

impl Report for Scaled<Bits> {
    fn add_to(&self, r: Record) -> Record {
        r.with("z", self.value.0)
    }
}

impl Report for Scaled<BoolOrAnd> {
    fn add_to(&self, r: Record) -> Record {
        r.with("z", self.value.0)
    }
}

fn ring_z<S: Ring>(bank: &PatternBank) -> Result<Scaled<S>> {
    let sys = build_pattern_system(bank, Variant::Prefixes)?;
    partition_function(&sys, &sys.costs::<S>(bank)).map(|(z, _)| z)
}

fn semiring_z<S: Semiring>(bank: &PatternBank, basic: bool) -> Result<Scaled<S>> {
    let sys = build_pattern_system(bank, Variant::ProperPrefixes)?;
    let costs = sys.costs::<S>(bank);
    if basic { infer_basic(&sys, &costs) } else { infer_fast(&sys, &costs) }
}

/// `Z` under the model's semiring with the requested algorithm.
fn partition(model: &ModelFile, alg: Algorithm, opts: &RunOptions) -> Result<(Algorithm, Record)> {
    let bank = &model.bank;
    let kind = model.semiring;
    let alg = match alg {
        Algorithm::Auto if kind.is_ring() => Algorithm::Alg1,
        Algorithm::Auto => Algorithm::Alg5,
        a => a,
    };
    let r = Record::new("result").with("command", "partition").with("semiring", kind).with("algorithm", alg.name());
    let r = match (alg, kind) {
        (Algorithm::Alg1, SemiringKind::SumProduct) => ring_z::<SumProduct<f64>>(bank)?.add_to(r),
        (Algorithm::Alg1, SemiringKind::Count) => ring_z::<Bits>(bank)?.add_to(r),
        (Algorithm::Alg1, _) => return Err(mismatch(alg, kind.name(), "needs subtraction")),
        (Algorithm::Alg4 | Algorithm::Alg5, _) => {
            let basic = alg == Algorithm::Alg4;
            match kind {
                SemiringKind::SumProduct => semiring_z::<SumProduct<f64>>(bank, basic)?.add_to(r),
                SemiringKind::MinPlus => semiring_z::<MinPlus<f64>>(bank, basic)?.add_to(r),
                SemiringKind::Count => semiring_z::<Bits>(bank, basic)?.add_to(r),
                SemiringKind::Bool => semiring_z::<BoolOrAnd>(bank, basic)?.add_to(r),
            }
        }
        (Algorithm::Alg6, SemiringKind::MinPlus) => {
            r.float("z", map_nonpositive::<f64>(bank, opts.map_options())?.energy)
        }
        (Algorithm::Alg6, _) => return Err(mismatch(alg, kind.name(), "only runs under min-plus")),
        (Algorithm::Auto, _) => unreachable!("resolved above"),
    };
    Ok((alg, r))
}

fn map(model: &ModelFile, opts: &RunOptions) -> Result<Record> {
    let bank = &model.bank;
    let r = Record::new("result").with("command", "map");
    let alg = match opts.algorithm {
        Algorithm::Auto => match check_nonpositive(bank) {
            Ok(()) => Algorithm::Alg6,
            Err(Error::PositiveCost(_)) => {
                let z = semiring_z::<MinPlus<f64>>(bank, false)?;
                return Ok(r.with("algorithm", "alg5").with("fallback", "positive-cost").float("energy", z.value.0));
            }
            Err(e) => return Err(e),
        },
        Algorithm::Alg1 => return Err(mismatch(Algorithm::Alg1, "min-plus", "needs subtraction")),
        a => a,
    };
    let r = r.with("algorithm", alg.name());
    Ok(match alg {
        Algorithm::Alg6 => {
            let s = map_nonpositive::<f64>(bank, opts.map_options())?;
            r.float("energy", s.energy).with("labeling", bank.alphabet().format_word(&crate::pattern::Word(s.labeling)))
        }
        _ => r.float("energy", semiring_z::<MinPlus<f64>>(bank, alg == Algorithm::Alg4)?.value.0),
    })
}

fn require_sum_product(model: &ModelFile, alg: Algorithm, what: &str) -> Result<()> {
    if model.semiring != SemiringKind::SumProduct {
        return Err(mismatch(alg, model.semiring.name(), &format!("{what} needs sum-product")));
    }
    if !matches!(alg, Algorithm::Auto | Algorithm::Alg1) {
        return Err(mismatch(alg, model.semiring.name(), &format!("{what} runs on the ring passes")));
    }
    Ok(())
}

fn marginal_records(model: &ModelFile, out: &mut ResultRecord) -> Result<()> {
    let t = marginals::<SumProduct<f64>>(&model.bank)?;
    out.push(t.z.add_to(Record::new("result").with("command", "marginals").with("algorithm", "alg1")));
    let alpha = model.bank.alphabet();
    let mut rows: Vec<_> = t.gamma_entries().collect();
    rows.sort_by(|a, b| a.placement.cmp(&b.placement));
    for e in rows {
        let p = t.probability(e).clamp(0.0, 1.0);
        out.push(
            Record::new("marginal")
                .with("word", alpha.format_word(&e.placement.word))
                .with("start", e.placement.start)
                .with("end", e.placement.end)
                .float("probability", p),
        );
    }
    Ok(())
}

fn stats_record(model: &ModelFile) -> Result<Record> {
    let st = compute_bank_stats(&model.bank)?;
    let sys = build_pattern_system(&model.bank, Variant::Prefixes)?;
    Ok(Record::new("stats")
        .with("n", model.bank.n())
        .with("alphabet", model.bank.alphabet().len())
        .with("words", model.bank.gamma().len())
        .with("L", st.l)
        .with("ell_max", st.ell_max)
        .with("P", st.p)
        .with("P_prime", st.p_prime)
        .with("I", st.i_size)
        .with("nodes", sys.total_nodes()))
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }
}

struct Checker {
    out: ResultRecord,
    worst: f64,
}

impl Checker {
    fn compare(&mut self, what: &str, engine: f64, oracle: f64) {
        let dev = relative(engine, oracle);
        self.worst = self.worst.max(dev);
        self.out.push(Record::new("check").with("quantity", what).float("engine", engine).float("oracle", oracle).float("deviation", dev));
    }
}

fn check(model: &ModelFile, opts: &RunOptions) -> Result<ResultRecord> {
    let bank = &model.bank;
    let size = (bank.alphabet().len() as f64).powi(bank.n() as i32);
    if size > CHECK_LIMIT {
        return Err(Error::TooLarge { size, limit: CHECK_LIMIT });
    }
    let mut c = Checker { out: ResultRecord::default(), worst: 0.0 };
    let kind = model.semiring;
    let algs: &[Algorithm] =
        if kind.is_ring() { &[Algorithm::Alg1, Algorithm::Alg4, Algorithm::Alg5] } else { &[Algorithm::Alg4, Algorithm::Alg5] };
    let oracle = match kind {
        SemiringKind::SumProduct => brute_force_partition(bank)?,
        SemiringKind::MinPlus => brute_force_z::<MinPlus<f64>>(bank)?.0,
        SemiringKind::Count => brute_force_z::<Bits>(bank)?.0 as f64,
        SemiringKind::Bool => f64::from(u8::from(brute_force_z::<BoolOrAnd>(bank)?.0)),
    };
    for &alg in algs {
        let (_, r) = partition(model, alg, opts)?;
        let z: f64 = r.get("z").and_then(|v| v.parse().ok()).unwrap_or(match r.get("z") {
            Some("true") => 1.0,
            _ => 0.0,
        });
        c.compare(&format!("z/{}", alg.name()), z, oracle);
    }
    let (best, _) = brute_force_map(bank)?;
    let fast = semiring_z::<MinPlus<f64>>(bank, false)?.value.0;
    c.compare("map/alg5", fast, best);
    if check_nonpositive(bank).is_ok() {
        let s = map_nonpositive::<f64>(bank, opts.map_options())?;
        c.compare("map/alg6", s.energy, best);
        c.compare("map/alg6-labeling", s.labeling_energy, best);
    }
    if kind == SemiringKind::SumProduct {
        let t = marginals::<SumProduct<f64>>(bank)?;
        let want = brute_force_marginals(bank)?;
        let mut worst = 0.0f64;
        for e in &t.entries {
            if let Some(&o) = want.get(&e.placement) {
                worst = worst.max(relative(e.z.to_float(), o));
            } else {
                worst = f64::INFINITY;
            }
        }
        c.worst = c.worst.max(worst);
        c.out.push(Record::new("check").with("quantity", "marginals").with("placements", t.entries.len()).float("deviation", worst));
    }
    let ok = c.worst <= CHECK_TOLERANCE;
    let verdict = if ok { "all-match" } else { "mismatch" };
    let mut out = ResultRecord::default();
    out.push(Record::new("result").with("command", "check").with("verdict", verdict).float("max_deviation", c.worst));
    out.records.extend(c.out.records);
    out.success = ok;
    Ok(out)
}

/// Runs one command on a parsed model.
pub fn run_command(command: Command, model: &ModelFile, opts: &RunOptions) -> Result<ResultRecord> {
    let started = Instant::now();
    let mut out = ResultRecord { records: Vec::new(), success: true };
    match command {
        Command::Partition => out.push(partition(model, opts.algorithm, opts)?.1),
        Command::Map => out.push(map(model, opts)?),
        Command::Marginals => {
            require_sum_product(model, opts.algorithm, "marginals")?;
            marginal_records(model, &mut out)?;
        }
        Command::Sample => {
            require_sum_product(model, opts.algorithm, "sampling")?;
            let sampler = Sampler::new(&model.bank, opts.sampler)?;
            let draws = sampler.sample_many(opts.count, opts.seed)?;
            let mode = match opts.sampler {
                SamplerMode::Direct => "direct",
                SamplerMode::Alias => "alias",
            };
            out.push(
                Record::new("result")
                    .with("command", "sample")
                    .with("mode", mode)
                    .with("seed", opts.seed)
                    .with("count", opts.count),
            );
            let alpha = model.bank.alphabet();
            for (i, x) in draws.into_iter().enumerate() {
                out.push(Record::new("sample").with("index", i).with("labeling", alpha.format_word(&crate::pattern::Word(x))));
            }
        }
        Command::Stats => out.push(stats_record(model)?),
        Command::Check => out = check(model, opts)?,
    }
    if command != Command::Stats && command != Command::Check {
        out.push(stats_record(model)?);
    }
    if opts.timing {
        out.push(Record::new("timing").float("seconds", started.elapsed().as_secs_f64()));
    }
    Ok(out)
}
