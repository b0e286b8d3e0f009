use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{dot, SeededRng};

/// Binary classification data: `p` sparse samples over `d` features with
/// labels in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub d: usize,
    /// Per sample, `(feature, value)` pairs with 1-based, strictly increasing
    /// feature indices.
    pub samples: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn p(&self) -> usize {
        self.samples.len()
    }

    pub fn nnz(&self) -> usize {
        self.samples.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        if self.d == 0 || self.p() == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.d * self.p()) as f64
    }

    /// Writes the dataset back out in LIBSVM text form.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for (sample, &label) in self.samples.iter().zip(&self.labels) {
            out.push_str(if label > 0.0 { "+1" } else { "-1" });
            for &(j, v) in sample {
                let _ = write!(out, " {j}:{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Rescales every feature linearly onto `[-1, 1]` using its observed
    /// range over all samples (implicit zeros included). Constant features
    /// are left untouched.
    pub fn scale_min_max(&mut self) {
        let p = self.p();
        let mut lo = vec![f64::INFINITY; self.d + 1];
        let mut hi = vec![f64::NEG_INFINITY; self.d + 1];
        let mut count = vec![0usize; self.d + 1];
        for s in &self.samples {
            for &(j, v) in s {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
                count[j] += 1;
            }
        }
        for j in 1..=self.d {
            if count[j] < p {
                lo[j] = lo[j].min(0.0);
                hi[j] = hi[j].max(0.0);
            }
        }
        // zeros may map to nonzero values, so densify every sample
        for s in &mut self.samples {
            let mut dense = vec![0.0; self.d + 1];
            for &(j, v) in s.iter() {
                dense[j] = v;
            }
            s.clear();
            for j in 1..=self.d {
                let v = if hi[j] > lo[j] {
                    2.0 * (dense[j] - lo[j]) / (hi[j] - lo[j]) - 1.0
                } else {
                    dense[j]
                };
                if v != 0.0 {
                    s.push((j, v));
                }
            }
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses LIBSVM text: one sample per nonblank line, a label followed by
/// `index:value` pairs with 1-based strictly increasing indices. Text after
/// `#` is ignored.
///
/// Labels are mapped onto `{-1, +1}`: data already in that set is kept;
/// otherwise the two distinct labels are sorted and the smaller maps to -1
/// (so `0/1` becomes `-1/+1` and `1/2` becomes `-1/+1`). A single distinct
/// label maps by sign, with 0 going to -1. More than two labels is an error.
///
/// `d` is the largest feature index seen unless `d_override` is given.
pub fn parse_libsvm<R: BufRead>(reader: R, d_override: Option<usize>) -> Result<Dataset> {
    let mut samples = Vec::new();
    let mut raw_labels = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let label_tok = tokens.next().expect("nonblank line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, format!("bad label `{label_tok}`")));
        }
        let mut entries = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected index:value, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature index `{idx}`")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad feature value `{val}`")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "feature indices are 1-based"));
            }
            if idx <= prev {
                return Err(parse_err(lineno, format!("feature index {idx} not increasing")));
            }
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value at feature {idx}")));
            }
            prev = idx;
            entries.push((idx, val));
        }
        max_index = max_index.max(prev);
        samples.push(entries);
        raw_labels.push((lineno, label));
    }

    let d = match d_override {
        Some(d) if d < max_index => {
            return Err(Error::DimensionMismatch(format!(
                "feature index {max_index} exceeds requested dimension {d}"
            )))
        }
        Some(d) => d,
        None => max_index,
    };

    let labels = normalize_labels(&raw_labels)?;
    Ok(Dataset { d, samples, labels })
}

pub fn parse_libsvm_file(path: impl AsRef<Path>, d_override: Option<usize>) -> Result<Dataset> {
    let file = File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_libsvm(BufReader::new(file), d_override)
}

fn normalize_labels(raw: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = Vec::new();
    for &(line, l) in raw {
        if !distinct.contains(&l) {
            if distinct.len() == 2 {
                return Err(parse_err(line, "more than two distinct labels"));
            }
            distinct.push(l);
        }
    }
    distinct.sort_by(|a, b| a.total_cmp(b));
    let already_signed = distinct.iter().all(|&l| l == 1.0 || l == -1.0);
    Ok(raw
        .iter()
        .map(|&(_, l)| {
            if already_signed {
                l
            } else if distinct.len() == 2 {
                if l == distinct[0] {
                    -1.0
                } else {
                    1.0
                }
            } else if l > 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect())
}

/// Gaussian samples labelled by a random hyperplane through the origin,
/// with 5% of labels flipped.
pub fn synthetic_dataset(p: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = SeededRng::new(seed);
    let truth: Vec<f64> = (0..d).map(|_| rng.draw_normal()).collect();
    let mut samples = Vec::with_capacity(p);
    let mut labels = Vec::with_capacity(p);
    for _ in 0..p {
        let a: Vec<f64> = (0..d).map(|_| rng.draw_normal()).collect();
        let mut y = if dot(&a, &truth) >= 0.0 { 1.0 } else { -1.0 };
        if rng.draw_uniform() < 0.05 {
            y = -y;
        }
        samples.push(a.into_iter().enumerate().map(|(j, v)| (j + 1, v)).collect());
        labels.push(y);
    }
    Dataset { d, samples, labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Result<Dataset> {
        parse_libsvm(s.as_bytes(), None)
    }

    #[test]
    fn single_line() {
        let ds = parse("+1 1:0.5 3:-1.0\n").unwrap();
        assert_eq!(ds.p(), 1);
        assert_eq!(ds.d, 3);
        assert_eq!(ds.samples[0], vec![(1, 0.5), (3, -1.0)]);
        assert_eq!(ds.labels, vec![1.0]);
    }

    #[test]
    fn empty_stream() {
        let ds = parse("").unwrap();
        assert_eq!(ds.p(), 0);
        assert_eq!(ds.d, 0);
        assert_eq!(parse("\n  \n# only a comment\n").unwrap().p(), 0);
    }

    #[test]
    fn malformed_inputs_report_line() {
        for (text, line) in [
            ("1 2:abc\n", 1),
            ("+1 1:1\n-1 3:1 2:1\n", 2),
            ("+1 1:1\n-1 2:1 2:1\n", 2),
            ("x 1:1\n", 1),
            ("+1 0:1\n", 1),
            ("+1 1\n", 1),
            ("+1 q:1\n", 1),
        ] {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn label_mapping() {
        assert_eq!(parse("0 1:1\n1 1:2\n").unwrap().labels, vec![-1.0, 1.0]);
        assert_eq!(parse("2 1:1\n1 1:2\n").unwrap().labels, vec![1.0, -1.0]);
        assert_eq!(parse("-1 1:1\n+1 1:2\n").unwrap().labels, vec![-1.0, 1.0]);
        assert!(matches!(parse("1 1:1\n2 1:1\n3 1:1\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn dimension_override() {
        let ds = parse_libsvm("+1 2:1\n".as_bytes(), Some(5)).unwrap();
        assert_eq!(ds.d, 5);
        assert!(parse_libsvm("+1 7:1\n".as_bytes(), Some(5)).is_err());
    }

    #[test]
    fn min_max_scaling() {
        let mut ds = parse("+1 1:2 2:10\n-1 1:4\n").unwrap();
        ds.scale_min_max();
        // feature 1 spans [2,4]; feature 2 spans [0,10]
        assert_eq!(ds.samples[0], vec![(1, -1.0), (2, 1.0)]);
        assert_eq!(ds.samples[1], vec![(1, 1.0), (2, -1.0)]);
    }

    #[test]
    fn synthetic_is_seeded() {
        let a = synthetic_dataset(20, 3, 1);
        assert_eq!(a, synthetic_dataset(20, 3, 1));
        assert_ne!(a, synthetic_dataset(20, 3, 2));
        assert!(a.labels.iter().all(|&l| l == 1.0 || l == -1.0));
        assert_eq!(a.density(), 1.0);
    }

    proptest! {
        #[test]
        fn round_trip(rows in prop::collection::vec(
            (any::<bool>(), prop::collection::btree_map(1usize..50, -1e6f64..1e6, 0..8)),
            0..10,
        )) {
            let text: String = rows
                .iter()
                .map(|(pos, feats)| {
                    let mut line = String::from(if *pos { "+1" } else { "-1" });
                    for (j, v) in feats {
                        line.push_str(&format!(" {j}:{v}"));
                    }
                    line + "\n"
                })
                .collect();
            let first = parse(&text).unwrap();
            let second = parse(&first.to_libsvm()).unwrap();
            prop_assert_eq!(first, second);
        }
    }
}
