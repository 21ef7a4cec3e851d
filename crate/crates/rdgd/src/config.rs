//! Experiment configuration: a flat `key = value` text format, one pair per
//! line, `#` starting a comment. Unknown keys, type errors, and invariant
//! violations are reported with the offending key and line.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::channel::CorruptionPolicy;
use crate::engine::Algorithm;
use crate::error::{Error, Result};
use crate::losses::LossKind;

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    SyntheticRegression {
        n: usize,
        p: usize,
    },
    SyntheticTwoclass {
        n: usize,
        p: usize,
        gamma: f64,
        test_fraction: f64,
    },
    Mnist {
        train_images: PathBuf,
        train_labels: PathBuf,
        test_images: PathBuf,
        test_labels: PathBuf,
        subsample_train: usize,
        subsample_test: usize,
    },
    Csv {
        path: PathBuf,
        test_fraction: f64,
    },
}

impl DataSource {
    pub fn name(&self) -> &'static str {
        match self {
            DataSource::SyntheticRegression { .. } => "synthetic_regression",
            DataSource::SyntheticTwoclass { .. } => "synthetic_twoclass",
            DataSource::Mnist { .. } => "mnist",
            DataSource::Csv { .. } => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleSpec {
    FixedHorizon,
    InvSqrt,
    PowerLaw,
    /// None means "auto": a = alpha / M resolved once the data constants are
    /// known.
    Ratio(Option<f64>),
    RatioHarmonic,
}

impl ScheduleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleSpec::FixedHorizon => "fixed_horizon",
            ScheduleSpec::InvSqrt => "inv_sqrt",
            ScheduleSpec::PowerLaw => "power_law",
            ScheduleSpec::Ratio(_) => "ratio",
            ScheduleSpec::RatioHarmonic => "ratio_harmonic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub loss: LossKind,
    pub data: DataSource,
    pub workers: usize,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    pub sigma2: f64,
    pub schedule: ScheduleSpec,
    pub corruption: CorruptionPolicy,
    pub kappa: f64,
    pub r: f64,
    pub radius: f64,
    /// Mirror-map coefficient; None resolves to M (RDGD) or eta_1 * alpha
    /// (the strongly convex algorithms).
    pub beta: Option<f64>,
    /// None resolves by loss kind: gap recording on for the regression
    /// losses, off for the classifiers.
    pub record_gap: Option<bool>,
    pub bounds: bool,
    pub restart_full_reset: bool,
    pub jobs: usize,
}

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                key: line.to_string(),
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config { line: line_no, key, msg: "empty key".into() });
            }
            if entries.insert(key.clone(), (line_no, value)).is_some() {
                return Err(Error::Config { line: line_no, key, msg: "duplicate key".into() });
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn parse_with<T>(&mut self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => match parse(&value) {
                Some(v) => Ok(Some(v)),
                None => Err(Error::Config {
                    line,
                    key: key.into(),
                    msg: format!("cannot parse value `{value}`"),
                }),
            },
        }
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>> {
        self.parse_with(key, |v| v.parse::<usize>().ok())
    }

    fn u64_opt(&mut self, key: &str) -> Result<Option<u64>> {
        self.parse_with(key, |v| v.parse::<u64>().ok())
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
    }

    fn bool_opt(&mut self, key: &str) -> Result<Option<bool>> {
        self.parse_with(key, |v| match v {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
    }

    fn string_opt(&mut self, key: &str) -> Result<Option<(usize, String)>> {
        Ok(self.take(key))
    }

    fn reject_unknown(&self) -> Result<()> {
        if let Some((key, (line, _))) = self.entries.iter().next() {
            return Err(Error::Config { line: *line, key: key.clone(), msg: "unknown key".into() });
        }
        Ok(())
    }
}

fn config_err(line: usize, key: &str, msg: impl Into<String>) -> Error {
    Error::Config { line, key: key.into(), msg: msg.into() }
}

/// Parse and validate a configuration text; every default is resolved here.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut raw = RawConfig::parse(text)?;

    let algorithm = match raw.string_opt("algorithm")? {
        None => Algorithm::Rdgd,
        Some((line, v)) => match v.as_str() {
            "dgd" => Algorithm::Dgd,
            "rdgd" => Algorithm::Rdgd,
            "rdgd_sc" => Algorithm::RdgdSc,
            "rdgd_restart" => Algorithm::RdgdRestart,
            _ => return Err(config_err(line, "algorithm", format!("unknown algorithm `{v}`"))),
        },
    };

    let (loss_line, loss_name) = raw
        .string_opt("loss")?
        .ok_or_else(|| Error::ConfigGeneral("missing required key `loss`".into()))?;
    let lambda = raw.f64_opt("lambda")?;
    let classes = raw.usize_opt("classes")?.unwrap_or(10);
    let loss = match loss_name.as_str() {
        "least_squares" => {
            if lambda.is_some() {
                return Err(config_err(loss_line, "lambda", "least_squares takes no lambda"));
            }
            LossKind::LeastSquares
        }
        "ridge" => {
            let lambda = lambda
                .ok_or_else(|| config_err(loss_line, "lambda", "ridge requires `lambda`"))?;
            if lambda <= 0.0 {
                return Err(config_err(loss_line, "lambda", "ridge lambda must be positive"));
            }
            LossKind::Ridge { lambda }
        }
        "l2svm" => {
            let lambda = lambda
                .ok_or_else(|| config_err(loss_line, "lambda", "l2svm requires `lambda`"))?;
            if lambda <= 0.0 {
                return Err(config_err(loss_line, "lambda", "l2svm lambda must be positive"));
            }
            LossKind::L2Svm { lambda }
        }
        "softmax_ce" => {
            if lambda.is_some() {
                return Err(config_err(loss_line, "lambda", "softmax_ce takes no lambda"));
            }
            if classes < 2 {
                return Err(config_err(loss_line, "classes", "softmax needs at least 2 classes"));
            }
            LossKind::SoftmaxCe { classes }
        }
        _ => return Err(config_err(loss_line, "loss", format!("unknown loss `{loss_name}`"))),
    };

    let workers = raw.usize_opt("m")?.unwrap_or(1);
    if workers == 0 {
        return Err(Error::ConfigGeneral("m must be at least 1".into()));
    }
    let horizon = raw.usize_opt("t")?.unwrap_or(500);
    if horizon == 0 {
        return Err(Error::ConfigGeneral("t (horizon) must be at least 1".into()));
    }
    let trials = raw.usize_opt("trials")?.unwrap_or(1);
    if trials == 0 {
        return Err(Error::ConfigGeneral("trials must be at least 1".into()));
    }
    let seed = raw.u64_opt("seed")?.unwrap_or(1);
    let sigma2 = raw.f64_opt("sigma2")?.unwrap_or(0.0);
    if sigma2 < 0.0 {
        return Err(Error::ConfigGeneral(format!("sigma2 must be nonnegative, got {sigma2}")));
    }
    let jobs = raw.usize_opt("jobs")?.unwrap_or(1).max(1);

    // Dataset source.
    let data_name = raw.string_opt("data")?;
    let n = raw.usize_opt("n")?;
    let p = raw.usize_opt("p")?;
    let gamma = raw.f64_opt("gamma")?.unwrap_or(4.0);
    let test_fraction = raw.f64_opt("test_fraction")?.unwrap_or(0.0);
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::ConfigGeneral(format!("test_fraction must lie in [0, 1), got {test_fraction}")));
    }
    if gamma <= 0.0 {
        return Err(Error::ConfigGeneral(format!("gamma must be positive, got {gamma}")));
    }
    let subsample_train = raw.usize_opt("subsample_train")?.unwrap_or(0);
    let subsample_test = raw.usize_opt("subsample_test")?.unwrap_or(0);
    let mnist_paths = [
        raw.string_opt("mnist_train_images")?,
        raw.string_opt("mnist_train_labels")?,
        raw.string_opt("mnist_test_images")?,
        raw.string_opt("mnist_test_labels")?,
    ];
    let csv_path = raw.string_opt("csv_path")?;

    let data_kind = match &data_name {
        Some((_, v)) => v.clone(),
        None => match loss {
            LossKind::LeastSquares | LossKind::Ridge { .. } => "synthetic_regression".into(),
            LossKind::L2Svm { .. } => "synthetic_twoclass".into(),
            LossKind::SoftmaxCe { .. } => {
                return Err(Error::ConfigGeneral(
                    "softmax_ce requires an explicit `data` source (mnist or csv)".into(),
                ))
            }
        },
    };
    let need_n = || n.ok_or_else(|| Error::ConfigGeneral(format!("{data_kind} requires `n`")));
    let need_p = || p.ok_or_else(|| Error::ConfigGeneral(format!("{data_kind} requires `p`")));
    let data = match data_kind.as_str() {
        "synthetic_regression" => DataSource::SyntheticRegression { n: need_n()?, p: need_p()? },
        "synthetic_twoclass" => {
            DataSource::SyntheticTwoclass { n: need_n()?, p: need_p()?, gamma, test_fraction }
        }
        "mnist" => {
            let [ti, tl, vi, vl] = mnist_paths;
            let need = |name: &str, v: Option<(usize, String)>| {
                v.map(|(_, s)| PathBuf::from(s))
                    .ok_or_else(|| Error::ConfigGeneral(format!("mnist data requires `{name}`")))
            };
            DataSource::Mnist {
                train_images: need("mnist_train_images", ti)?,
                train_labels: need("mnist_train_labels", tl)?,
                test_images: need("mnist_test_images", vi)?,
                test_labels: need("mnist_test_labels", vl)?,
                subsample_train,
                subsample_test,
            }
        }
        "csv" => {
            let (_, path) = csv_path
                .ok_or_else(|| Error::ConfigGeneral("csv data requires `csv_path`".into()))?;
            DataSource::Csv { path: PathBuf::from(path), test_fraction }
        }
        other => {
            return Err(Error::ConfigGeneral(format!("unknown data source `{other}`")));
        }
    };

    // Synthetic sample counts are known statically; enforce the shard
    // divisibility here so the error points at the config.
    if let DataSource::SyntheticRegression { n, .. } = &data {
        if n % workers != 0 {
            return Err(Error::ConfigGeneral(format!("m must divide N (m = {workers}, N = {n})")));
        }
    }

    let ratio_a = match raw.string_opt("ratio_a")? {
        None => None,
        Some((_, v)) if v == "auto" => None,
        Some((line, v)) => match v.parse::<f64>() {
            Ok(a) if a.is_finite() && a > 0.0 && a < 1.0 => Some(a),
            _ => return Err(config_err(line, "ratio_a", "must be `auto` or a number in (0, 1)")),
        },
    };
    let schedule = match raw.string_opt("schedule")? {
        None => {
            if algorithm == Algorithm::RdgdRestart || algorithm == Algorithm::RdgdSc {
                ScheduleSpec::Ratio(ratio_a)
            } else {
                ScheduleSpec::FixedHorizon
            }
        }
        Some((line, v)) => match v.as_str() {
            "fixed_horizon" => ScheduleSpec::FixedHorizon,
            "inv_sqrt" => ScheduleSpec::InvSqrt,
            "power_law" => ScheduleSpec::PowerLaw,
            "ratio" => ScheduleSpec::Ratio(ratio_a),
            "ratio_harmonic" => ScheduleSpec::RatioHarmonic,
            _ => return Err(config_err(line, "schedule", format!("unknown schedule `{v}`"))),
        },
    };
    if algorithm == Algorithm::RdgdRestart && !matches!(schedule, ScheduleSpec::Ratio(_)) {
        return Err(Error::ConfigGeneral(
            "rdgd_restart runs ratio(alpha/M) in stage 1; set `schedule = ratio` or omit the key".into(),
        ));
    }

    let corruption = match raw.string_opt("corruption")? {
        None => CorruptionPolicy::None,
        Some((line, v)) => match v.as_str() {
            "none" => CorruptionPolicy::None,
            "residual_greedy" => CorruptionPolicy::ResidualGreedy,
            "uniform_split" => CorruptionPolicy::UniformSplit,
            _ => return Err(config_err(line, "corruption", format!("unknown policy `{v}`"))),
        },
    };
    let kappa = raw.f64_opt("kappa")?.unwrap_or(0.0);
    if kappa < 0.0 {
        return Err(Error::ConfigGeneral(format!("kappa must be nonnegative, got {kappa}")));
    }
    if corruption != CorruptionPolicy::None && kappa == 0.0 {
        return Err(Error::ConfigGeneral(format!(
            "corruption policy {} needs a positive `kappa`",
            corruption.name()
        )));
    }
    let r = raw.f64_opt("r")?.unwrap_or(0.0);
    if !(0.0..1.0).contains(&r) {
        return Err(Error::ConfigGeneral(format!("corruption exponent r must lie in [0, 1), got {r}")));
    }
    if algorithm == Algorithm::RdgdRestart && !(r > 0.0 && r < 0.5) {
        return Err(Error::ConfigGeneral(format!(
            "rdgd_restart requires 0 < r < 1/2 for its transition time, got r = {r}"
        )));
    }

    let radius = raw.f64_opt("radius")?.unwrap_or(1000.0);
    if radius <= 0.0 {
        return Err(Error::ConfigGeneral(format!("radius must be positive, got {radius}")));
    }
    let beta = match raw.string_opt("beta")? {
        None => None,
        Some((_, v)) if v == "auto" => None,
        Some((line, v)) => match v.parse::<f64>() {
            Ok(b) if b.is_finite() && b > 0.0 => Some(b),
            _ => return Err(config_err(line, "beta", "must be `auto` or a positive number")),
        },
    };
    let record_gap = match raw.string_opt("record_gap")? {
        None => None,
        Some((_, v)) if v == "auto" => None,
        Some((line, v)) => match v.as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => return Err(config_err(line, "record_gap", "must be auto, true, or false")),
        },
    };
    let bounds = raw.bool_opt("bounds")?.unwrap_or(false);
    let restart_full_reset = match raw.string_opt("restart_mode")? {
        None => false,
        Some((_, v)) if v == "hybrid" => false,
        Some((_, v)) if v == "full_reset" => true,
        Some((line, v)) => {
            return Err(config_err(line, "restart_mode", format!("unknown mode `{v}` (hybrid | full_reset)")))
        }
    };

    if matches!(loss, LossKind::SoftmaxCe { .. })
        && matches!(algorithm, Algorithm::RdgdSc | Algorithm::RdgdRestart)
    {
        return Err(Error::ConfigGeneral(
            "softmax_ce is not strongly convex (alpha = 0); use dgd or rdgd".into(),
        ));
    }

    raw.reject_unknown()?;

    Ok(ExperimentConfig {
        algorithm,
        loss,
        data,
        workers,
        horizon,
        trials,
        seed,
        sigma2,
        schedule,
        corruption,
        kappa,
        r,
        radius,
        beta,
        record_gap,
        bounds,
        restart_full_reset,
        jobs,
    })
}

impl ExperimentConfig {
    /// Rebase relative dataset paths onto `base` (the directory the config
    /// file lives in), so configs work regardless of the process's working
    /// directory. Absolute paths are untouched.
    pub fn resolve_paths(&mut self, base: &std::path::Path) {
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.data {
            DataSource::Mnist { train_images, train_labels, test_images, test_labels, .. } => {
                rebase(train_images);
                rebase(train_labels);
                rebase(test_images);
                rebase(test_labels);
            }
            DataSource::Csv { path, .. } => rebase(path),
            _ => {}
        }
    }

    /// Every key with its resolved value, in config syntax. Parsing the echo
    /// reproduces this config.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        push("algorithm", self.algorithm.name().into());
        push("loss", self.loss.name().into());
        match self.loss {
            LossKind::Ridge { lambda } | LossKind::L2Svm { lambda } => {
                push("lambda", format!("{lambda}"));
            }
            LossKind::SoftmaxCe { classes } => push("classes", format!("{classes}")),
            LossKind::LeastSquares => {}
        }
        push("data", self.data.name().into());
        match &self.data {
            DataSource::SyntheticRegression { n, p } => {
                push("n", format!("{n}"));
                push("p", format!("{p}"));
            }
            DataSource::SyntheticTwoclass { n, p, gamma, test_fraction } => {
                push("n", format!("{n}"));
                push("p", format!("{p}"));
                push("gamma", format!("{gamma}"));
                push("test_fraction", format!("{test_fraction}"));
            }
            DataSource::Mnist {
                train_images,
                train_labels,
                test_images,
                test_labels,
                subsample_train,
                subsample_test,
            } => {
                push("mnist_train_images", train_images.display().to_string());
                push("mnist_train_labels", train_labels.display().to_string());
                push("mnist_test_images", test_images.display().to_string());
                push("mnist_test_labels", test_labels.display().to_string());
                push("subsample_train", format!("{subsample_train}"));
                push("subsample_test", format!("{subsample_test}"));
            }
            DataSource::Csv { path, test_fraction } => {
                push("csv_path", path.display().to_string());
                push("test_fraction", format!("{test_fraction}"));
            }
        }
        push("m", format!("{}", self.workers));
        push("t", format!("{}", self.horizon));
        push("trials", format!("{}", self.trials));
        push("seed", format!("{}", self.seed));
        push("sigma2", format!("{}", self.sigma2));
        push("schedule", self.schedule.name().into());
        if let ScheduleSpec::Ratio(a) = self.schedule {
            push("ratio_a", a.map_or_else(|| "auto".into(), |a| format!("{a}")));
        }
        push("corruption", self.corruption.name().into());
        push("kappa", format!("{}", self.kappa));
        push("r", format!("{}", self.r));
        push("radius", format!("{}", self.radius));
        push("beta", self.beta.map_or_else(|| "auto".into(), |b| format!("{b}")));
        push(
            "record_gap",
            self.record_gap.map_or_else(|| "auto".into(), |b| format!("{b}")),
        );
        push("bounds", format!("{}", self.bounds));
        if self.algorithm == Algorithm::RdgdRestart {
            push("restart_mode", if self.restart_full_reset { "full_reset" } else { "hybrid" }.into());
        }
        push("jobs", format!("{}", self.jobs));
        out
    }

    pub fn echo_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.echo() {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}
