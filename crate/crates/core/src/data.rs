//! Dataset ingestion: LIBSVM-format parsing, row normalization, label
//! canonicalization, train/test splitting, and synthetic generators used for
//! desk-scale experiments.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One data row in compressed sparse form: strictly increasing 0-based
/// indices, matching values, and an optional classification label.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSample {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
    pub label: Option<f64>,
}

impl SparseSample {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Inner product with a dense vector.
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| v * w[i as usize])
            .sum()
    }

    /// `acc[support] += coeff * values`.
    pub fn axpy_into(&self, coeff: f64, acc: &mut [f64]) {
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            acc[i as usize] += coeff * v;
        }
    }
}

/// A loaded dataset: samples plus the ambient dimension.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub samples: Vec<SparseSample>,
    pub dim: usize,
    pub normalized: bool,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Parses LIBSVM text: `<label> <idx>:<val> ...` per line, 1-based strictly
/// increasing indices, `#` starting a comment. Indices are converted to
/// 0-based; labels are stored raw (see [`canonicalize_labels`]).
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut samples = Vec::new();
    let mut dim = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap();
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("bad label token `{label_tok}`"),
        })?;
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut prev: i64 = 0;
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("expected `<idx>:<val>`, got `{tok}`"),
            })?;
            let idx: i64 = idx_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad index `{idx_s}`"),
            })?;
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad value `{val_s}`"),
            })?;
            if idx < 1 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("indices are 1-based, got {idx}"),
                });
            }
            if idx <= prev {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("indices must be strictly increasing ({prev} then {idx})"),
                });
            }
            prev = idx;
            indices.push((idx - 1) as u32);
            values.push(val);
            dim = dim.max(idx as usize);
        }
        samples.push(SparseSample { indices, values, label: Some(label) });
    }
    Ok(Dataset { samples, dim, normalized: false })
}

/// Opens a LIBSVM file, transparently decompressing `.gz` inputs.
pub fn open_dataset(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    if path.extension().map(|e| e == "gz").unwrap_or(false) {
        parse_libsvm(BufReader::new(flate2::read::GzDecoder::new(file)))
    } else {
        parse_libsvm(BufReader::new(file))
    }
}

/// Writes a dataset back out in LIBSVM text form (1-based indices).
pub fn write_libsvm<W: Write>(ds: &Dataset, out: &mut W) -> Result<()> {
    for s in &ds.samples {
        let label = s.label.unwrap_or(0.0);
        write!(out, "{label}")?;
        for (&i, &v) in s.indices.iter().zip(&s.values) {
            write!(out, " {}:{v}", i + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Maps raw labels onto `{-1, 1}`: `{0,1} -> {-1,1}`, `{1,2} -> {-1,1}`
/// (smaller value to -1), `{-1,1}` unchanged.
pub fn canonicalize_labels(mut ds: Dataset) -> Result<Dataset> {
    let mut distinct: Vec<f64> = Vec::new();
    for s in &ds.samples {
        let l = s.label.ok_or_else(|| Error::Unsupported("sample without label".into()))?;
        if !distinct.iter().any(|&d| d == l) {
            distinct.push(l);
            if distinct.len() > 2 {
                return Err(Error::Unsupported(format!(
                    "more than two distinct labels (found {distinct:?} ...)"
                )));
            }
        }
    }
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let map = |l: f64| -> f64 {
        if distinct.len() == 1 {
            // degenerate single-class data: keep sign if already canonical
            if l == -1.0 { -1.0 } else { 1.0 }
        } else if l == distinct[0] {
            -1.0
        } else {
            1.0
        }
    };
    if distinct == [-1.0, 1.0] {
        return Ok(ds);
    }
    for s in &mut ds.samples {
        s.label = Some(map(s.label.unwrap()));
    }
    Ok(ds)
}

/// Scales every nonzero row to unit l2 norm; zero rows are dropped (their
/// count is logged).
pub fn normalize_rows(mut ds: Dataset) -> Dataset {
    let before = ds.samples.len();
    ds.samples.retain(|s| s.norm_sq() > 0.0);
    let dropped = before - ds.samples.len();
    if dropped > 0 {
        log::warn!("normalize_rows: dropped {dropped} zero rows");
    }
    for s in &mut ds.samples {
        let inv = 1.0 / s.norm_sq().sqrt();
        for v in &mut s.values {
            *v *= inv;
        }
    }
    ds.normalized = true;
    ds
}

/// Deterministic shuffled split: `floor(n * test_fraction)` test rows, the
/// rest train. Identical seed gives an identical split.
pub fn split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid(format!(
            "test fraction must be in [0, 1), got {test_fraction}"
        )));
    }
    let n = ds.samples.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = RngStream::new(seed, 0x5_111);
    for i in (1..n).rev() {
        let j = rng.gen_index(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let n_test = (n as f64 * test_fraction).floor() as usize;
    let test_samples: Vec<_> = order[..n_test].iter().map(|&i| ds.samples[i].clone()).collect();
    let train_samples: Vec<_> = order[n_test..].iter().map(|&i| ds.samples[i].clone()).collect();
    Ok((
        Dataset { samples: train_samples, dim: ds.dim, normalized: ds.normalized },
        Dataset { samples: test_samples, dim: ds.dim, normalized: ds.normalized },
    ))
}

const SYNTH_DENSITY: f64 = 0.1;

fn random_sparse_row(d: usize, rng: &mut RngStream) -> SparseSample {
    let nnz = ((d as f64 * SYNTH_DENSITY).round() as usize).clamp(1, d);
    let mut indices: Vec<u32> = Vec::with_capacity(nnz);
    while indices.len() < nnz {
        let i = rng.gen_index(d as u64) as u32;
        if !indices.contains(&i) {
            indices.push(i);
        }
    }
    indices.sort_unstable();
    let values: Vec<f64> = (0..nnz).map(|_| rng.gen_normal()).collect();
    SparseSample { indices, values, label: None }
}

/// Reproducible unit-norm rows for NN-PCA: sparse noise (density 0.1) plus
/// a planted nonnegative principal direction over the first `d/5`
/// coordinates, so the instance has a dominant eigenvector instead of a
/// nearly flat spectrum.
pub fn synth_nnpca(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = RngStream::new(seed, 0x5_201);
    let k = (d / 5).max(1);
    let spike = 1.5 / (k as f64).sqrt();
    let samples = (0..n)
        .map(|_| {
            let noise = random_sparse_row(d, &mut rng);
            let c = spike * rng.gen_normal();
            let mut dense = vec![0.0; d];
            for j in 0..k {
                dense[j] = c;
            }
            noise.axpy_into(1.0, &mut dense);
            let (indices, values) = dense
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i as u32, *v))
                .unzip();
            SparseSample { indices, values, label: None }
        })
        .collect();
    normalize_rows(Dataset { samples, dim: d, normalized: false })
}

/// Reproducible sparse classification data with labels from a planted
/// hyperplane. `separability = 1` plants noiseless labels, so a perfect
/// linear predictor exists; lower values flip each label with probability
/// `1 - separability`.
pub fn synth_binclass(n: usize, d: usize, seed: u64, separability: f64) -> Dataset {
    let mut rng = RngStream::new(seed, 0x5_202);
    let plane: Vec<f64> = (0..d).map(|_| rng.gen_normal()).collect();
    let mut ds = Dataset {
        samples: (0..n).map(|_| random_sparse_row(d, &mut rng)).collect(),
        dim: d,
        normalized: false,
    };
    for s in &mut ds.samples {
        let score = s.dot(&plane);
        let mut label = if score >= 0.0 { 1.0 } else { -1.0 };
        if rng.gen_f64() > separability {
            label = -label;
        }
        s.label = Some(label);
    }
    normalize_rows(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str) -> Result<Dataset> {
        parse_libsvm(Cursor::new(text))
    }

    #[test]
    fn parses_basic_lines() {
        let ds = parse("1 3:0.5 7:1.2\n-1 1:1\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.dim, 7);
        assert_eq!(ds.samples[0].label, Some(1.0));
        assert_eq!(ds.samples[0].indices, vec![2, 6]);
        assert_eq!(ds.samples[0].values, vec![0.5, 1.2]);
        assert_eq!(ds.samples[1].indices, vec![0]);
        assert_eq!(ds.samples[1].label, Some(-1.0));
    }

    #[test]
    fn handles_comments_crlf_and_whitespace() {
        let ds = parse("# header\n1 2:1.0  # trailing\r\n\r\n-1 1:0.5 \r\n").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.samples[0].indices, vec![1]);
    }

    #[test]
    fn rejects_malformed_input() {
        match parse("1 5:a\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse("1 3:1 2:1\n").is_err(), "nonincreasing indices");
        assert!(parse("x 1:1\n").is_err(), "bad label");
        assert!(parse("1 0:1\n").is_err(), "0-based index in input");
    }

    #[test]
    fn roundtrip() {
        let text = "1 3:0.5 7:1.25\n-1 1:1\n2 2:0.125\n";
        let ds = parse(text).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        let ds2 = parse_libsvm(Cursor::new(&buf)).unwrap();
        assert_eq!(ds.samples, ds2.samples);
        assert_eq!(ds.dim, ds2.dim);
    }

    #[test]
    fn label_canonicalization() {
        let ds = parse("0 1:1\n1 2:1\n").unwrap();
        let ds = canonicalize_labels(ds).unwrap();
        assert_eq!(ds.samples[0].label, Some(-1.0));
        assert_eq!(ds.samples[1].label, Some(1.0));

        let ds = parse("1 1:1\n2 2:1\n").unwrap();
        let ds = canonicalize_labels(ds).unwrap();
        assert_eq!(ds.samples[0].label, Some(-1.0));
        assert_eq!(ds.samples[1].label, Some(1.0));

        let ds = parse("-1 1:1\n1 2:1\n").unwrap();
        let ds = canonicalize_labels(ds).unwrap();
        assert_eq!(ds.samples[0].label, Some(-1.0));

        let ds = parse("1 1:1\n2 2:1\n3 3:1\n").unwrap();
        assert!(canonicalize_labels(ds).is_err());
    }

    #[test]
    fn normalization() {
        let ds = parse("1 1:3 2:4\n1 3:1\n").unwrap();
        let ds = normalize_rows(ds);
        assert!((ds.samples[0].values[0] - 0.6).abs() < 1e-15);
        assert!((ds.samples[0].values[1] - 0.8).abs() < 1e-15);
        assert!((ds.samples[1].values[0] - 1.0).abs() < 1e-16);
        // idempotent
        let again = normalize_rows(ds.clone());
        assert_eq!(ds.samples, again.samples);
    }

    #[test]
    fn zero_rows_dropped() {
        let ds = parse("1 1:0 2:0\n1 1:2\n").unwrap();
        let ds = normalize_rows(ds);
        assert_eq!(ds.len(), 1);
    }

    #[test]
    fn split_behaviour() {
        let ds = synth_nnpca(100, 10, 7);
        let (train, test) = split(&ds, 0.1, 42).unwrap();
        assert_eq!(test.len(), 10);
        assert_eq!(train.len(), 90);
        let (train2, test2) = split(&ds, 0.1, 42).unwrap();
        assert_eq!(train.samples, train2.samples);
        assert_eq!(test.samples, test2.samples);
        let (all, none) = split(&ds, 0.0, 1).unwrap();
        assert_eq!(all.len(), 100);
        assert!(none.is_empty());
    }

    #[test]
    fn synthetic_datasets() {
        let a = synth_nnpca(50, 20, 3);
        let b = synth_nnpca(50, 20, 3);
        assert_eq!(a.samples, b.samples);
        for s in &a.samples {
            assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        }

        let c = synth_binclass(80, 20, 5, 1.0);
        for s in &c.samples {
            assert!(matches!(s.label, Some(l) if l == 1.0 || l == -1.0));
            assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        }
    }
}
