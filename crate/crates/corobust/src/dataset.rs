//! Seeded synthetic datasets, stored as a directory of instance files plus a
//! manifest.
//!
//! ```text
//! <dir>/manifest.json
//! <dir>/train/0000.json ...
//! <dir>/test/0000.json ...
//! ```
//!
//! Instance `i` of the whole dataset (train first, then test) is generated
//! from `derive_seed(spec.seed, i)`, so regenerating with the same spec gives
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use corobust_core::attack::derive_seed;
use corobust_core::{
    AtspInstance, CoverageBudget, CoverageInstance, DagInstance, Element, Instance, Job, ProblemKind,
};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::format::{self, FormatError};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SizeSpec {
    Dag {
        jobs: usize,
        /// Expected number of parents of a job outside the first layer.
        #[serde(default = "default_parents")]
        parents: f64,
    },
    Atsp {
        cities: usize,
    },
    Mc {
        sets: usize,
        elements: usize,
        /// Set budget; defaults to a tenth of the sets.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    Mcscc {
        sets: usize,
        blacks: usize,
        whites: usize,
        /// White threshold; defaults to a tenth of the whites.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_white: Option<usize>,
    },
}

fn default_parents() -> f64 {
    2.0
}

impl SizeSpec {
    pub fn problem(&self) -> ProblemKind {
        match self {
            SizeSpec::Dag { .. } => ProblemKind::Dag,
            SizeSpec::Atsp { .. } => ProblemKind::Atsp,
            SizeSpec::Mc { .. } => ProblemKind::MaxCover,
            SizeSpec::Mcscc { .. } => ProblemKind::MaxCoverSeparate,
        }
    }

    /// Short label such as `atsp-20` or `mc-100-200`.
    pub fn label(&self) -> String {
        match self {
            SizeSpec::Dag { jobs, .. } => format!("dag-{jobs}"),
            SizeSpec::Atsp { cities } => format!("atsp-{cities}"),
            SizeSpec::Mc { sets, elements, .. } => format!("mc-{sets}-{elements}"),
            SizeSpec::Mcscc { sets, blacks, whites, .. } => format!("mcscc-{sets}-{blacks}-{whites}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub size: SizeSpec,
    pub train: usize,
    pub test: usize,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("invalid dataset spec: {0}")]
    Spec(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("line {line}: {message}")]
    Orlib { line: usize, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: &str| Err(DatasetError::Spec(m.to_string()));
        if self.train + self.test == 0 {
            return bad("at least one instance is required");
        }
        match self.size {
            SizeSpec::Dag { jobs, parents } => {
                if jobs == 0 || !(parents.is_finite() && parents >= 0.0) {
                    return bad("dag needs jobs >= 1 and a finite parents >= 0");
                }
            }
            SizeSpec::Atsp { cities } => {
                if cities < 2 {
                    return bad("atsp needs at least 2 cities");
                }
            }
            SizeSpec::Mc { sets, elements, k } => {
                if sets == 0 || elements == 0 {
                    return bad("mc needs sets and elements");
                }
                if k.is_some_and(|k| k == 0 || k > sets) {
                    return bad("mc k must lie in 1..=sets");
                }
            }
            SizeSpec::Mcscc { sets, blacks, whites, k_white } => {
                if sets == 0 || blacks == 0 {
                    return bad("mcscc needs sets and black elements");
                }
                if blacks * 20 != whites {
                    return bad("mcscc black elements must be 5% of the white elements");
                }
                if k_white.is_some_and(|k| k > whites) {
                    return bad("mcscc k_white exceeds the number of white elements");
                }
            }
        }
        Ok(())
    }
}

/// One instance drawn from `size` with a generator seeded by `seed`.
pub fn generate_instance(size: &SizeSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *size {
        SizeSpec::Dag { jobs, parents } => layered_dag(&mut rng, jobs, parents),
        SizeSpec::Atsp { cities } => tmat(&mut rng, cities),
        SizeSpec::Mc { sets, elements, k } => max_cover(&mut rng, sets, elements, k),
        SizeSpec::Mcscc { sets, blacks, whites, k_white } => separate_cover(&mut rng, sets, blacks, whites, k_white),
    }
}

fn layered_dag(rng: &mut ChaCha8Rng, n: usize, parents: f64) -> Instance {
    let layers = ((n as f64).sqrt().ceil() as usize).max(1);
    let jobs: Vec<Job> = (0..n)
        .map(|_| {
            let duration = (rng.random::<f64>() * 100f64.ln()).exp();
            let resource = rng.random_range(0.05..=0.6);
            Job::new(duration, resource)
        })
        .collect();
    let mut layer: Vec<usize> = (0..n).map(|_| rng.random_range(0..layers)).collect();
    layer.sort_unstable();
    let mut edges = Vec::new();
    for v in 0..n {
        let earlier = layer.partition_point(|&l| l < layer[v]);
        if earlier == 0 {
            continue;
        }
        let p = (parents / earlier as f64).min(1.0);
        for u in 0..earlier {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Instance::Dag(DagInstance::new(jobs, edges).expect("layered edges are acyclic"))
}

/// Integer weights in `[1, 1e6]`, closed under the triangle inequality.
fn tmat(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let mut d: Vec<f64> = (0..n * n).map(|_| rng.random_range(1..=1_000_000u32) as f64).collect();
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    floyd_warshall(&mut d, n);
    Instance::Atsp(AtspInstance::new(n, d).expect("closed weights stay positive"))
}

pub(crate) fn floyd_warshall(d: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
}

fn max_cover(rng: &mut ChaCha8Rng, sets: usize, elements: usize, k: Option<usize>) -> Instance {
    let p = (2.0 / sets as f64).min(1.0);
    let mut members = vec![Vec::new(); sets];
    for e in 0..elements {
        let mut covered = false;
        for m in members.iter_mut() {
            if rng.random::<f64>() < p {
                m.push(e);
                covered = true;
            }
        }
        if !covered {
            members[rng.random_range(0..sets)].push(e);
        }
    }
    let weights = (0..elements).map(|_| Element::black(rng.random_range(1..=100u32) as f64)).collect();
    let k = k.unwrap_or((sets / 10).max(1));
    Instance::Coverage(CoverageInstance::new(weights, members, CoverageBudget::Sets(k)).expect("valid cover"))
}

/// Elements `0..blacks` are black, the rest white.
fn separate_cover(rng: &mut ChaCha8Rng, sets: usize, blacks: usize, whites: usize, k_white: Option<usize>) -> Instance {
    let mut elements: Vec<Element> = (0..blacks).map(|_| Element::black(rng.random::<f64>())).collect();
    elements.extend((0..whites).map(|_| Element::white()));
    // Wide spread so that a few sets dominate.
    let count = |rng: &mut ChaCha8Rng, mean: f64, max: usize| -> usize {
        let n = Normal::new(mean, 2.0 * mean).expect("finite parameters").sample(rng);
        n.round().clamp(0.0, max as f64) as usize
    };
    let mut members = Vec::with_capacity(sets);
    for _ in 0..sets {
        let b = count(rng, 2.0 * blacks as f64 / sets as f64, blacks);
        let w = count(rng, whites as f64 / sets as f64, whites);
        let mut m: Vec<usize> = index::sample(rng, blacks, b).into_iter().collect();
        m.extend(index::sample(rng, whites, w).into_iter().map(|i| blacks + i));
        members.push(m);
    }
    let k = k_white.unwrap_or(whites / 10);
    Instance::Coverage(
        CoverageInstance::new(elements, members, CoverageBudget::WhiteElements(k)).expect("valid cover"),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub spec: DatasetSpec,
    /// Paths relative to the dataset directory.
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl Manifest {
    pub fn files(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.train,
            Split::Test => &self.test,
        }
    }
}

/// Generates all instances of `spec` in memory, train split first.
pub fn generate_instances(spec: &DatasetSpec) -> Result<Vec<Instance>, DatasetError> {
    spec.validate()?;
    Ok((0..spec.train + spec.test).map(|i| generate_instance(&spec.size, derive_seed(spec.seed, i as u64))).collect())
}

pub fn generate_dataset(spec: &DatasetSpec, dir: &Path) -> Result<Manifest, DatasetError> {
    let instances = generate_instances(spec)?;
    let mut manifest =
        Manifest { format_version: format::FORMAT_VERSION, spec: spec.clone(), train: Vec::new(), test: Vec::new() };
    for split in [Split::Train, Split::Test] {
        fs::create_dir_all(dir.join(split.as_str())).map_err(io_err(dir))?;
    }
    for (i, q) in instances.iter().enumerate() {
        let (split, local) = if i < spec.train { (Split::Train, i) } else { (Split::Test, i - spec.train) };
        let rel = format!("{}/{local:04}.json", split.as_str());
        let path = dir.join(&rel);
        fs::write(&path, format::serialize_instance(q)).map_err(io_err(&path))?;
        match split {
            Split::Train => manifest.train.push(rel),
            Split::Test => manifest.test.push(rel),
        }
    }
    let path = dir.join(MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(manifest)
}

pub fn read_instance(path: &Path) -> Result<Instance, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    format::deserialize_instance(&text).map_err(|source| DatasetError::Format { path: path.to_path_buf(), source })
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<(), DatasetError> {
    fs::write(path, format::serialize_instance(instance)).map_err(io_err(path))
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

impl Dataset {
    pub fn open(dir: &Path) -> Result<Self, DatasetError> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| DatasetError::Manifest { path: path.clone(), message: e.to_string() })?;
        if manifest.format_version != format::FORMAT_VERSION {
            return Err(DatasetError::Manifest { path, message: "unsupported format_version".into() });
        }
        Ok(Dataset { dir: dir.to_path_buf(), manifest })
    }

    pub fn name(&self) -> String {
        self.manifest.spec.size.label()
    }

    /// `(file name, instance)` pairs of one split, in manifest order.
    pub fn load(&self, split: Split) -> Result<Vec<(String, Instance)>, DatasetError> {
        self.manifest
            .files(split)
            .iter()
            .map(|rel| Ok((rel.clone(), read_instance(&self.dir.join(rel))?)))
            .collect()
    }
}

/// Reads an OR-Library set-covering file (`scp*.txt`) as a max-cover
/// instance: rows become unit-weight elements and columns become sets.
///
/// Layout: `m n`, then `n` column costs (ignored), then for each row the
/// number of covering columns followed by their 1-based indices.
pub fn load_orlib_scp(text: &str, k: usize) -> Result<Instance, DatasetError> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(l, line)| line.split_whitespace().map(move |t| (l + 1, t)));
    let mut next = |what: &str| -> Result<usize, DatasetError> {
        let (line, tok) = tokens.next().ok_or(DatasetError::Orlib { line: 0, message: format!("missing {what}") })?;
        tok.parse::<usize>().map_err(|_| DatasetError::Orlib { line, message: format!("bad {what} {tok:?}") })
    };
    let rows = next("row count")?;
    let cols = next("column count")?;
    for _ in 0..cols {
        next("column cost")?;
    }
    let mut sets = vec![Vec::new(); cols];
    for r in 0..rows {
        let count = next("cover count")?;
        for _ in 0..count {
            let c = next("column index")?;
            if c == 0 || c > cols {
                return Err(DatasetError::Orlib { line: 0, message: format!("column {c} out of range") });
            }
            sets[c - 1].push(r);
        }
    }
    for s in &mut sets {
        s.sort_unstable();
        s.dedup();
    }
    let elements = vec![Element::black(1.0); rows];
    CoverageInstance::new(elements, sets, CoverageBudget::Sets(k))
        .map(Instance::Coverage)
        .map_err(|e| DatasetError::Orlib { line: 0, message: e.to_string() })
}
