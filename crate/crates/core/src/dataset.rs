//! Synthetic two-class datasets and a flat binary loader.
//!
//! All generators are deterministic given the spec's seed and produce
//! balanced classes. `two_moons` is the classic pair of interleaved
//! half-circles, `gaussian_blobs` two opposite Gaussian clusters, and
//! `xor_grid` four quadrant clusters labelled by the XOR of the quadrant
//! signs (not linearly separable). The `file` variant reads features and
//! labels from the binary tensor format documented in the README.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// Feature vectors with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    classes: usize,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Shape {
                context: "dataset labels",
                expected: features.len(),
                got: labels.len(),
            });
        }
        if classes < 2 {
            return Err(Error::Config(format!("need at least 2 classes, got {classes}")));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::Config(format!(
                "label {bad} out of range for {classes} classes"
            )));
        }
        let dim = features.first().map(|f| f.len()).unwrap_or(0);
        if features.iter().any(|f| f.len() != dim) {
            return Err(Error::Config("ragged feature rows".into()));
        }
        Ok(Self {
            features,
            labels,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map(|f| f.len()).unwrap_or(0)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Which synthetic generator (or file pair) produces the data.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    TwoMoons,
    GaussianBlobs,
    XorGrid,
    File,
}

/// Full description of a dataset: generator, size, noise, split, seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub generator: Generator,
    pub size: usize,
    pub noise: f64,
    /// Fraction of rows that go to the training split.
    pub split: f64,
    pub seed: u64,
    /// Feature/label paths for [`Generator::File`].
    pub features_path: Option<std::path::PathBuf>,
    pub labels_path: Option<std::path::PathBuf>,
}

const CLASSES: usize = 2;
const GEN_STREAM: u64 = 3;
const SPLIT_STREAM: u64 = 4;

impl DatasetSpec {
    fn validate(&self) -> Result<()> {
        if self.size < 2 * CLASSES {
            return Err(Error::Config(format!(
                "dataset size must be at least {}, got {}",
                2 * CLASSES,
                self.size
            )));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::Config(format!(
                "split fraction must lie in (0, 1), got {}",
                self.split
            )));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::Config(format!(
                "noise level must be non-negative, got {}",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Generates (or loads) the dataset and splits it into train/validation.
pub fn generate(spec: &DatasetSpec) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    let full = match spec.generator {
        Generator::TwoMoons => two_moons(spec.size, spec.noise, spec.seed),
        Generator::GaussianBlobs => gaussian_blobs(spec.size, spec.noise, spec.seed),
        Generator::XorGrid => xor_grid(spec.size, spec.noise, spec.seed),
        Generator::File => {
            let features = spec.features_path.as_ref().ok_or_else(|| {
                Error::Config("dataset.features_path is required for the file generator".into())
            })?;
            let labels = spec.labels_path.as_ref().ok_or_else(|| {
                Error::Config("dataset.labels_path is required for the file generator".into())
            })?;
            load_file(features, labels)?
        }
    };
    split(full, spec.split, spec.seed)
}

fn jitter<R: Rng + ?Sized>(rng: &mut R, noise: f64) -> f64 {
    if noise == 0.0 {
        0.0
    } else {
        let z: f64 = StandardNormal.sample(rng);
        z * noise
    }
}

/// Two interleaved half-circles.
pub fn two_moons(size: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(GEN_STREAM);
    let mut features = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    for i in 0..size {
        let class = i % CLASSES;
        let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (x, y) = if class == 0 {
            (t.cos(), t.sin())
        } else {
            (1.0 - t.cos(), 0.5 - t.sin())
        };
        features.push(vec![x + jitter(&mut rng, noise), y + jitter(&mut rng, noise)]);
        labels.push(class);
    }
    Dataset::new(features, labels, CLASSES).expect("generator output is consistent")
}

/// Two Gaussian clusters at opposite corners; zero noise degenerates to the
/// two centres and is trivially linearly separable.
pub fn gaussian_blobs(size: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(GEN_STREAM);
    let mut features = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    for i in 0..size {
        let class = i % CLASSES;
        let centre = if class == 0 { -1.0 } else { 1.0 };
        features.push(vec![
            centre + jitter(&mut rng, noise),
            centre + jitter(&mut rng, noise),
        ]);
        labels.push(class);
    }
    Dataset::new(features, labels, CLASSES).expect("generator output is consistent")
}

/// Four Gaussian clusters at the quadrant corners `(±1, ±1)`, labelled by the
/// XOR of the quadrant signs. With the cluster spread tied to the corner
/// scale no half-plane does much better than chance.
pub fn xor_grid(size: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(GEN_STREAM);
    let spread = 1.4 + noise;
    let mut features = Vec::with_capacity(size);
    let mut labels = Vec::with_capacity(size);
    for i in 0..size {
        let class = i % CLASSES;
        // Alternate between the two quadrants of each class.
        let flip = if (i / CLASSES) % 2 == 0 { 1.0 } else { -1.0 };
        let (cx, cy) = if class == 0 {
            (flip, flip)
        } else {
            (flip, -flip)
        };
        features.push(vec![
            cx + jitter(&mut rng, spread),
            cy + jitter(&mut rng, spread),
        ]);
        labels.push(class);
    }
    Dataset::new(features, labels, CLASSES).expect("generator output is consistent")
}

/// Seeded shuffle followed by a head/tail split.
pub fn split(full: Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = full.len();
    let n_train = ((n as f64) * fraction).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Config(format!(
            "split fraction {fraction} leaves an empty split for {n} rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let classes = full.classes();
    let mut train_x = Vec::with_capacity(n_train);
    let mut train_y = Vec::with_capacity(n_train);
    let mut val_x = Vec::with_capacity(n - n_train);
    let mut val_y = Vec::with_capacity(n - n_train);
    for (pos, &idx) in order.iter().enumerate() {
        if pos < n_train {
            train_x.push(full.features[idx].clone());
            train_y.push(full.labels[idx]);
        } else {
            val_x.push(full.features[idx].clone());
            val_y.push(full.labels[idx]);
        }
    }
    Ok((
        Dataset::new(train_x, train_y, classes)?,
        Dataset::new(val_x, val_y, classes)?,
    ))
}

/// Writes features as `ana-data v1` (text header, then row-major f64 LE).
pub fn write_features_file<P: AsRef<Path>>(path: P, data: &Dataset) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "ana-data v1\nrows {} cols {}\ndata\n", data.len(), data.dim())?;
    for row in &data.features {
        for v in row {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Writes labels as `ana-labels v1` (text header, then u32 LE).
pub fn write_labels_file<P: AsRef<Path>>(path: P, data: &Dataset) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(
        out,
        "ana-labels v1\nrows {} classes {}\ndata\n",
        data.len(),
        data.classes()
    )?;
    for &l in &data.labels {
        out.write_all(&(l as u32).to_le_bytes())?;
    }
    Ok(())
}

fn read_header_line<R: BufRead>(reader: &mut R) -> Result<String> {
    let mut line = String::new();
    reader.read_line(&mut line)?;
    Ok(line.trim_end().to_string())
}

fn parse_pair(line: &str, k1: &str, k2: &str) -> Result<(usize, usize)> {
    let tokens: Vec<&str> = line.split(' ').collect();
    if tokens.len() == 4 && tokens[0] == k1 && tokens[2] == k2 {
        if let (Ok(a), Ok(b)) = (tokens[1].parse(), tokens[3].parse()) {
            return Ok((a, b));
        }
    }
    Err(Error::Format(format!("bad header line: {line:?}")))
}

/// Reads a feature/label file pair written by the writers above.
pub fn load_file<P: AsRef<Path>, Q: AsRef<Path>>(features: P, labels: Q) -> Result<Dataset> {
    let mut fr = BufReader::new(std::fs::File::open(features)?);
    if read_header_line(&mut fr)? != "ana-data v1" {
        return Err(Error::Format("features file is not ana-data v1".into()));
    }
    let (rows, cols) = parse_pair(&read_header_line(&mut fr)?, "rows", "cols")?;
    if read_header_line(&mut fr)? != "data" {
        return Err(Error::Format("features file missing data marker".into()));
    }
    let mut bytes = vec![0u8; rows * cols * 8];
    fr.read_exact(&mut bytes)?;
    let mut features = Vec::with_capacity(rows);
    for r in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for c in 0..cols {
            let off = (r * cols + c) * 8;
            row.push(f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8 bytes")));
        }
        features.push(row);
    }

    let mut lr = BufReader::new(std::fs::File::open(labels)?);
    if read_header_line(&mut lr)? != "ana-labels v1" {
        return Err(Error::Format("labels file is not ana-labels v1".into()));
    }
    let (lrows, classes) = parse_pair(&read_header_line(&mut lr)?, "rows", "classes")?;
    if lrows != rows {
        return Err(Error::Format(format!(
            "labels file has {lrows} rows but features file has {rows}"
        )));
    }
    if read_header_line(&mut lr)? != "data" {
        return Err(Error::Format("labels file missing data marker".into()));
    }
    let mut lbytes = vec![0u8; rows * 4];
    lr.read_exact(&mut lbytes)?;
    let labels: Vec<usize> = lbytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")) as usize)
        .collect();
    Dataset::new(features, labels, classes)
}
