use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetError};

/// How to divide a dataset into training and testing patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Take `train_fraction` of every well separately, then pool.
    pub stratify_by_well: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train_fraction: 0.70, seed: 0, stratify_by_well: true }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(DatasetError::InvalidSplit(format!(
                "train_fraction {} not in (0, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Splits `data` into `(train, test)`.
///
/// Per group (each well when stratifying, the whole set otherwise),
/// `floor(train_fraction * n)` records chosen by a seeded shuffle go to the
/// training set. Both outputs keep the input order of their records.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DatasetError> {
    spec.validate()?;
    let records = data.records();
    let groups: Vec<(String, Vec<usize>)> = if spec.stratify_by_well {
        data.well_ids()
            .into_iter()
            .map(|w| {
                let idx = (0..records.len()).filter(|&i| records[i].well_id == w).collect();
                (w, idx)
            })
            .collect()
    } else {
        vec![("*".to_string(), (0..records.len()).collect())]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut in_train = vec![false; records.len()];
    for (well, mut idx) in groups {
        if idx.len() < 2 {
            return Err(DatasetError::TooFewRecords(well));
        }
        let n_train = (spec.train_fraction * idx.len() as f64 + 1e-9).floor() as usize;
        idx.shuffle(&mut rng);
        for &i in &idx[..n_train] {
            in_train[i] = true;
        }
    }

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (r, &t) in records.iter().zip(&in_train) {
        if t {
            train.push(r.clone());
        } else {
            test.push(r.clone());
        }
    }
    let build = |suffix: &str, recs| {
        Dataset::new(format!("{}-{suffix}", data.name()), recs).map_err(|e| match e {
            DatasetError::EmptyDataset => {
                DatasetError::InvalidSplit(format!("{suffix} partition would be empty"))
            }
            other => other,
        })
    };
    Ok((build("train", train)?, build("test", test)?))
}
