//! Per-label prototypes over a training set.
//!
//! Each training sample joins the prototype of its dominant label (argmax,
//! ties to the lowest label index), so prototype `i` holds samples whose degree
//! at label `i` is at least `1/L`. Every prototype, and the whole training set,
//! carries its own exact cosine search structure.

use crate::distribution::{LabelDistribution, LdlDataset};
use crate::error::{Error, Result};
use crate::search::{unit_normalize, NeighborSearch, SearchMode, UnitStore};

pub use crate::search::NeighborHit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrototypeMode {
    /// Disjoint partition by argmax label.
    #[default]
    Partition,
    /// A sample joins every prototype `i` whose degree exceeds `1/L`; rows with
    /// a perfectly uniform distribution join none.
    Overlapping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndexConfig {
    pub mode: PrototypeMode,
    pub search: SearchMode,
}

#[derive(Debug, Clone)]
pub struct PrototypeIndex {
    config: IndexConfig,
    n_features: usize,
    n_labels: usize,
    store: UnitStore,
    labels: Vec<LabelDistribution>,
    assignments: Vec<usize>,
    members: Vec<Vec<usize>>,
    searches: Vec<Option<NeighborSearch>>,
    global: NeighborSearch,
}

impl PrototypeIndex {
    pub fn build(dataset: &LdlDataset) -> Result<Self> {
        Self::with_config(dataset, IndexConfig::default())
    }

    pub fn with_config(dataset: &LdlDataset, config: IndexConfig) -> Result<Self> {
        let n_labels = dataset.n_labels();
        let mut store = UnitStore::new(dataset.n_features());
        for (row, x) in dataset.features().iter().enumerate() {
            store.push(x).map_err(|e| e.at_row(row + 1))?;
        }
        let labels = dataset.labels().to_vec();
        let assignments: Vec<usize> = labels.iter().map(LabelDistribution::argmax).collect();
        let mut members = vec![Vec::new(); n_labels];
        for (i, d) in labels.iter().enumerate() {
            for p in prototypes_for(config.mode, d) {
                members[p].push(i);
            }
        }
        let searches = members
            .iter()
            .map(|ids| {
                (!ids.is_empty()).then(|| NeighborSearch::build(&store, ids.clone(), config.search))
            })
            .collect();
        let global = NeighborSearch::build(&store, (0..labels.len()).collect(), config.search);
        Ok(Self {
            config,
            n_features: dataset.n_features(),
            n_labels,
            store,
            labels,
            assignments,
            members,
            searches,
            global,
        })
    }

    pub fn config(&self) -> IndexConfig {
        self.config
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    /// Label distribution of training row `i`.
    pub fn label(&self, i: usize) -> &LabelDistribution {
        &self.labels[i]
    }

    /// Argmax prototype of every training row.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn members(&self, prototype: usize) -> &[usize] {
        &self.members[prototype]
    }

    pub fn member_counts(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn is_empty_prototype(&self, prototype: usize) -> bool {
        self.members[prototype].is_empty()
    }

    /// Unit-normalizes a query after checking its length.
    pub fn normalize_query(&self, query: &[f64]) -> Result<Vec<f64>> {
        if query.len() != self.n_features {
            return Err(Error::LengthMismatch {
                expected: self.n_features,
                actual: query.len(),
            });
        }
        unit_normalize(query)
    }

    /// Most similar member of `prototype`, or `None` if it has no members.
    pub fn nearest_in_prototype(&self, prototype: usize, query: &[f64]) -> Result<Option<NeighborHit>> {
        if prototype >= self.n_labels {
            return Err(Error::BadPrototypeId {
                id: prototype,
                labels: self.n_labels,
            });
        }
        let unit = self.normalize_query(query)?;
        Ok(self.nearest_unit(prototype, &unit))
    }

    /// Nearest member of every prototype for one query.
    pub fn nearest_per_prototype(&self, query: &[f64]) -> Result<Vec<Option<NeighborHit>>> {
        let unit = self.normalize_query(query)?;
        Ok((0..self.n_labels).map(|p| self.nearest_unit(p, &unit)).collect())
    }

    fn nearest_unit(&self, prototype: usize, unit: &[f64]) -> Option<NeighborHit> {
        self.searches[prototype]
            .as_ref()
            .and_then(|s| s.nearest(&self.store, unit))
    }

    /// The `k` most similar training rows, best first.
    pub fn k_nearest_global(&self, query: &[f64], k: usize) -> Result<Vec<NeighborHit>> {
        if k == 0 || k > self.n_samples() {
            return Err(Error::BadK {
                k,
                max: self.n_samples(),
            });
        }
        let unit = self.normalize_query(query)?;
        Ok(self.global.top_k(&self.store, &unit, k))
    }

    /// Appends a training sample. It is visible to every later query.
    pub fn insert_sample(&mut self, x: &[f64], d: &LabelDistribution) -> Result<usize> {
        if d.len() != self.n_labels {
            return Err(Error::LengthMismatch {
                expected: self.n_labels,
                actual: d.len(),
            });
        }
        let id = self.store.push(x)?;
        self.labels.push(d.clone());
        self.assignments.push(d.argmax());
        for p in prototypes_for(self.config.mode, d) {
            self.members[p].push(id);
            match &mut self.searches[p] {
                Some(search) => search.insert(&self.store, id),
                slot @ None => {
                    *slot = Some(NeighborSearch::build(&self.store, vec![id], self.config.search))
                }
            }
        }
        self.global.insert(&self.store, id);
        Ok(id)
    }
}

fn prototypes_for(mode: PrototypeMode, d: &LabelDistribution) -> Vec<usize> {
    match mode {
        PrototypeMode::Partition => vec![d.argmax()],
        PrototypeMode::Overlapping => {
            let threshold = 1.0 / d.len() as f64;
            d.iter()
                .enumerate()
                .filter(|(_, &v)| v > threshold)
                .map(|(i, _)| i)
                .collect()
        }
    }
}
