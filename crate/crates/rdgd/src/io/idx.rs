//! IDX-format MNIST reader: big-endian magic 0x00000803 for image files and
//! 0x00000801 for label files, unsigned-byte payloads.

use std::path::Path;

use crate::error::{Error, Result};
use crate::losses::Dataset;
use crate::numerics::matrix::Matrix;
use crate::numerics::rng::RngStream;

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

fn idx_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Idx { path: path.to_path_buf(), msg: msg.into() }
}

fn read_u32_be(bytes: &[u8], offset: usize, path: &Path) -> Result<u32> {
    let slice = bytes
        .get(offset..offset + 4)
        .ok_or_else(|| idx_err(path, format!("truncated header at byte {offset}")))?;
    Ok(u32::from_be_bytes(slice.try_into().expect("4-byte slice")))
}

/// Pixels of an IDX image file, scaled to [0, 1] by /255, flattened
/// row-major. Returns (n, rows*cols, pixels).
fn load_images(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let magic = read_u32_be(&bytes, 0, path)?;
    if magic != IMAGE_MAGIC {
        return Err(idx_err(path, format!("bad magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}")));
    }
    let n = read_u32_be(&bytes, 4, path)? as usize;
    let rows = read_u32_be(&bytes, 8, path)? as usize;
    let cols = read_u32_be(&bytes, 12, path)? as usize;
    let expected = 16 + n * rows * cols;
    if bytes.len() != expected {
        return Err(idx_err(
            path,
            format!("payload is {} bytes, header promises {expected} ({n} images of {rows}x{cols})", bytes.len()),
        ));
    }
    let pixels = bytes[16..].iter().map(|b| *b as f64 / 255.0).collect();
    Ok((n, rows * cols, pixels))
}

fn load_labels(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let magic = read_u32_be(&bytes, 0, path)?;
    if magic != LABEL_MAGIC {
        return Err(idx_err(path, format!("bad magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}")));
    }
    let n = read_u32_be(&bytes, 4, path)? as usize;
    if bytes.len() != 8 + n {
        return Err(idx_err(path, format!("payload is {} bytes, header promises {}", bytes.len(), 8 + n)));
    }
    let labels: Vec<f64> = bytes[8..].iter().map(|b| *b as f64).collect();
    if let Some(bad) = labels.iter().find(|l| **l > 9.0) {
        return Err(idx_err(path, format!("label {bad} outside 0..=9")));
    }
    Ok(labels)
}

/// Load an image/label file pair into a dataset.
pub fn load_mnist(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let (n, p, pixels) = load_images(images_path)?;
    let labels = load_labels(labels_path)?;
    if labels.len() != n {
        return Err(idx_err(
            labels_path,
            format!("{} labels for {n} images in {}", labels.len(), images_path.display()),
        ));
    }
    let features = Matrix::from_vec(n, p, pixels)?;
    Dataset::new(features, labels)
}

/// Deterministic class-stratified subsample: `take` must be a multiple of
/// `classes`, and each class contributes take/classes rows chosen by a
/// seeded shuffle. The selected rows are shuffled again so shards mix
/// classes.
pub fn stratified_subsample(data: &Dataset, take: usize, classes: usize, rng: &mut RngStream) -> Result<Dataset> {
    if take == 0 || take > data.len() {
        return Err(Error::ConfigGeneral(format!(
            "subsample of {take} from {} samples is not possible",
            data.len()
        )));
    }
    if !take.is_multiple_of(classes) {
        return Err(Error::ConfigGeneral(format!(
            "stratified subsample size {take} must be a multiple of {classes} classes"
        )));
    }
    let per_class = take / classes;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, label) in data.responses.iter().enumerate() {
        let c = *label as usize;
        if c >= classes {
            return Err(Error::ConfigGeneral(format!("label {label} outside the {classes}-class range")));
        }
        by_class[c].push(i);
    }
    let mut chosen = Vec::with_capacity(take);
    for (c, mut members) in by_class.into_iter().enumerate() {
        if members.len() < per_class {
            return Err(Error::ConfigGeneral(format!(
                "class {c} has only {} samples, need {per_class}",
                members.len()
            )));
        }
        rng.shuffle(&mut members);
        chosen.extend_from_slice(&members[..per_class]);
    }
    rng.shuffle(&mut chosen);

    let p = data.dim();
    let mut rows = Vec::with_capacity(take * p);
    let mut responses = Vec::with_capacity(take);
    for &i in &chosen {
        rows.extend_from_slice(data.features.row(i));
        responses.push(data.responses[i]);
    }
    Dataset::new(Matrix::from_vec(take, p, rows)?, responses)
}
