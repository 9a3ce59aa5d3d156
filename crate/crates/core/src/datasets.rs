//! Seeded dataset generators and the plain-text dataset format.
//!
//! All generators draw from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha),
//! so a `DatasetSpec` plus seed always reproduces the same sequence. Real-valued
//! samples are rounded to nearest and clamped to `[0, 2^width - 1]`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bit_memory::{fits_in, MAX_WIDTH};
use crate::error::{Error, Result};

pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng::seed_from_u64";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Uniform,
    Normal,
    Clustered,
    Kruskal,
    MapReduce,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 5] = [
        DatasetKind::Uniform,
        DatasetKind::Normal,
        DatasetKind::Clustered,
        DatasetKind::Kruskal,
        DatasetKind::MapReduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Uniform => "uniform",
            DatasetKind::Normal => "normal",
            DatasetKind::Clustered => "clustered",
            DatasetKind::Kruskal => "kruskal",
            DatasetKind::MapReduce => "mapreduce",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown distribution {s:?}")))
    }
}

/// Distribution parameters. Anything not relevant to the chosen kind is
/// ignored but still written to the metadata sidecar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub normal_mean: f64,
    pub normal_std: f64,
    pub cluster_centers: Vec<f64>,
    pub cluster_std: f64,
    /// Kruskal edge weights are uniform over `[1, max_weight]`.
    pub kruskal_max_weight: u64,
    pub mapreduce_groups: usize,
    /// Group centers are uniform over `[0, center_range)`.
    pub mapreduce_center_range: u64,
    /// Off-center samples add a uniform offset in `[0, offset_range)`.
    pub mapreduce_offset_range: u64,
    /// Probability that a sample is exactly its group's center.
    pub mapreduce_center_prob: f64,
}

impl DatasetParams {
    /// Normal mean `2^(w-1)` with std `2^(w-1)/3`; the clustered and
    /// application-like parameters are absolute.
    pub fn defaults_for(width: u32) -> Self {
        let half = 2f64.powi(width.saturating_sub(1) as i32);
        DatasetParams {
            normal_mean: half,
            normal_std: half / 3.0,
            cluster_centers: vec![2f64.powi(15), 2f64.powi(25)],
            cluster_std: 2f64.powi(13),
            kruskal_max_weight: 1024,
            mapreduce_groups: 8,
            mapreduce_center_range: 1 << 20,
            mapreduce_offset_range: 1 << 12,
            mapreduce_center_prob: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub n: usize,
    pub width: u32,
    pub seed: u64,
    pub params: DatasetParams,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, n: usize, width: u32, seed: u64) -> Self {
        DatasetSpec {
            kind,
            n,
            width,
            seed,
            params: DatasetParams::defaults_for(width),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(msg.to_owned()));
        let p = &self.params;
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if !(1..=MAX_WIDTH).contains(&self.width) {
            return bad("width must be in 1..=64");
        }
        match self.kind {
            DatasetKind::Uniform => {}
            DatasetKind::Normal => {
                if !(p.normal_std.is_finite() && p.normal_std >= 0.0 && p.normal_mean.is_finite()) {
                    return bad("normal mean/std must be finite with std >= 0");
                }
            }
            DatasetKind::Clustered => {
                if p.cluster_centers.is_empty() {
                    return bad("clustered needs at least one center");
                }
                if !(p.cluster_std.is_finite() && p.cluster_std >= 0.0)
                    || p.cluster_centers.iter().any(|c| !c.is_finite())
                {
                    return bad("cluster centers/std must be finite with std >= 0");
                }
            }
            DatasetKind::Kruskal => {
                if p.kruskal_max_weight == 0 {
                    return bad("kruskal max weight must be at least 1");
                }
            }
            DatasetKind::MapReduce => {
                if p.mapreduce_groups == 0 || p.mapreduce_center_range == 0 || p.mapreduce_offset_range == 0 {
                    return bad("mapreduce groups and ranges must be at least 1");
                }
                if !(0.0..=1.0).contains(&p.mapreduce_center_prob) {
                    return bad("mapreduce center probability must be in [0, 1]");
                }
            }
        }
        Ok(())
    }
}

pub fn max_value(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Rounds to nearest and clamps into `[0, 2^width - 1]`.
pub fn clamp_to_width(x: f64, width: u32) -> u64 {
    let max = max_value(width);
    let r = x.round();
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= max as f64 {
        max
    } else {
        (r as u64).min(max)
    }
}

fn normal(mean: f64, std: f64) -> Normal<f64> {
    Normal::new(mean, std).expect("validated std")
}

pub fn generate(spec: &DatasetSpec) -> Result<Vec<u64>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let w = spec.width;
    let max = max_value(w);
    let p = &spec.params;

    let values = match spec.kind {
        DatasetKind::Uniform => (0..spec.n).map(|_| rng.random_range(0..=max)).collect(),
        DatasetKind::Normal => {
            let dist = normal(p.normal_mean, p.normal_std);
            (0..spec.n).map(|_| clamp_to_width(dist.sample(&mut rng), w)).collect()
        }
        DatasetKind::Clustered => {
            let dists: Vec<_> = p.cluster_centers.iter().map(|&c| normal(c, p.cluster_std)).collect();
            (0..spec.n)
                .map(|_| {
                    let d = &dists[rng.random_range(0..dists.len())];
                    clamp_to_width(d.sample(&mut rng), w)
                })
                .collect()
        }
        DatasetKind::Kruskal => (0..spec.n)
            .map(|_| rng.random_range(1..=p.kruskal_max_weight).min(max))
            .collect(),
        DatasetKind::MapReduce => {
            let centers: Vec<u64> = (0..p.mapreduce_groups)
                .map(|_| rng.random_range(0..p.mapreduce_center_range))
                .collect();
            (0..spec.n)
                .map(|_| {
                    let center = centers[rng.random_range(0..centers.len())];
                    let v = if rng.random_bool(p.mapreduce_center_prob) {
                        center
                    } else {
                        center.saturating_add(rng.random_range(0..p.mapreduce_offset_range))
                    };
                    v.min(max)
                })
                .collect()
        }
    };
    Ok(values)
}

/// Reads one unsigned decimal integer per line. With `width`, values that
/// do not fit are rejected.
pub fn load_file(path: impl AsRef<Path>, width: Option<u32>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_values(&text, width).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.to_owned(),
            line,
            message,
        },
        other => other,
    })
}

pub fn parse_values(text: &str, width: Option<u32>) -> Result<Vec<u64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let parse_err = |message: String| Error::Parse {
            path: PathBuf::new(),
            line: i + 1,
            message,
        };
        let token = line.trim();
        if token.is_empty() {
            return Err(parse_err("blank line".into()));
        }
        let v: u64 = token
            .parse()
            .map_err(|e| parse_err(format!("{token:?} is not an unsigned integer: {e}")))?;
        if let Some(w) = width {
            if !fits_in(v, w) {
                return Err(Error::ValueOverflow {
                    index: i,
                    value: v,
                    width: w,
                });
            }
        }
        values.push(v);
    }
    Ok(values)
}

pub fn format_values(values: &[u64]) -> String {
    let mut out = String::with_capacity(values.len() * 11);
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn save_file(path: impl AsRef<Path>, values: &[u64]) -> Result<()> {
    fs::write(path, format_values(values))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub generator: String,
    #[serde(flatten)]
    pub spec: DatasetSpec,
}

/// Sidecar path: `data.txt` → `data.txt.meta.json`.
pub fn metadata_path(path: impl AsRef<Path>) -> PathBuf {
    let mut os = path.as_ref().as_os_str().to_owned();
    os.push(".meta.json");
    PathBuf::from(os)
}

pub fn save_metadata(path: impl AsRef<Path>, spec: &DatasetSpec) -> Result<PathBuf> {
    let meta = DatasetMetadata {
        generator: GENERATOR.to_owned(),
        spec: spec.clone(),
    };
    let out = metadata_path(path);
    fs::write(&out, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(out)
}
