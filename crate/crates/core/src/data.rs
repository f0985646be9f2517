//! Column-oriented numeric tables with variable roles.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Outcome,
    Treatment,
    Instrument,
    Covariate,
    Cluster,
    Weight,
}

/// Which column plays which part in the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roles {
    pub outcome: String,
    pub treatment: String,
    pub instruments: Vec<String>,
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default)]
    pub cluster: Option<String>,
    #[serde(default)]
    pub weight: Option<String>,
}

impl Roles {
    pub fn new(outcome: &str, treatment: &str, instruments: &[&str]) -> Self {
        Roles {
            outcome: outcome.to_string(),
            treatment: treatment.to_string(),
            instruments: instruments.iter().map(|s| s.to_string()).collect(),
            covariates: Vec::new(),
            cluster: None,
            weight: None,
        }
    }

    pub fn with_covariates(mut self, covariates: &[&str]) -> Self {
        self.covariates = covariates.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_cluster(mut self, cluster: &str) -> Self {
        self.cluster = Some(cluster.to_string());
        self
    }

    pub fn with_weight(mut self, weight: &str) -> Self {
        self.weight = Some(weight.to_string());
        self
    }

    /// Every column that carries a role, in a stable order.
    pub fn assignments(&self) -> Vec<(&str, Role)> {
        let mut out = vec![
            (self.outcome.as_str(), Role::Outcome),
            (self.treatment.as_str(), Role::Treatment),
        ];
        out.extend(self.instruments.iter().map(|c| (c.as_str(), Role::Instrument)));
        out.extend(self.covariates.iter().map(|c| (c.as_str(), Role::Covariate)));
        if let Some(c) = &self.cluster {
            out.push((c.as_str(), Role::Cluster));
        }
        if let Some(c) = &self.weight {
            out.push((c.as_str(), Role::Weight));
        }
        out
    }

    pub fn role_of(&self, column: &str) -> Option<Role> {
        self.assignments()
            .into_iter()
            .find(|(c, _)| *c == column)
            .map(|(_, r)| r)
    }
}

/// Dense cluster labels `0..count`, in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clusters {
    ids: Vec<usize>,
    count: usize,
}

impl Clusters {
    pub fn from_ids(raw: &[usize]) -> Self {
        let mut map = HashMap::new();
        let ids = raw
            .iter()
            .map(|&r| {
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect();
        Clusters {
            ids,
            count: map.len(),
        }
    }

    /// Labels taken from a numeric column; equal values share a cluster.
    pub fn from_values(values: &[f64]) -> Self {
        let mut map: HashMap<u64, usize> = HashMap::new();
        let ids = values
            .iter()
            .map(|v| {
                // -0.0 and 0.0 label the same cluster
                let key = if *v == 0.0 { 0 } else { v.to_bits() };
                let next = map.len();
                *map.entry(key).or_insert(next)
            })
            .collect();
        Clusters {
            ids,
            count: map.len(),
        }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Row indices of each cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (row, &g) in self.ids.iter().enumerate() {
            out[g].push(row);
        }
        out
    }

    pub fn require_at_least_two(&self) -> Result<()> {
        if self.count < 2 {
            Err(Error::ClusterCount { found: self.count })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_rows: usize,
    roles: Roles,
    clusters: Option<Clusters>,
}

impl Dataset {
    /// Builds and validates a dataset. Columns without a role are kept but
    /// ignored by the estimators.
    pub fn new(columns: Vec<(String, Vec<f64>)>, roles: Roles) -> Result<Self> {
        let n_rows = columns.first().map(|(_, c)| c.len()).unwrap_or(0);
        let mut names = Vec::with_capacity(columns.len());
        let mut data = Vec::with_capacity(columns.len());
        for (name, col) in columns {
            if names.contains(&name) {
                return Err(Error::Config(format!("duplicate column '{name}'")));
            }
            if col.len() != n_rows {
                return Err(Error::Config(format!(
                    "column '{name}' has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
            names.push(name);
            data.push(col);
        }
        let mut ds = Dataset {
            names,
            columns: data,
            n_rows,
            roles,
            clusters: None,
        };
        ds.validate()?;
        if let Some(c) = &ds.roles.cluster {
            let clusters = Clusters::from_values(ds.column(c)?);
            clusters.require_at_least_two()?;
            ds.clusters = Some(clusters);
        }
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        if self.roles.instruments.is_empty() {
            return Err(Error::Config("at least one instrument is required".into()));
        }
        let mut seen: Vec<&str> = Vec::new();
        for (col, role) in self.roles.assignments() {
            if seen.contains(&col) {
                return Err(Error::Config(format!("column '{col}' is given more than one role")));
            }
            seen.push(col);
            let values = self.column(col)?;
            if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    row: row + 1,
                    column: col.to_string(),
                    message: "non-finite value in a role column".into(),
                });
            }
            if role == Role::Weight {
                if let Some(row) = values.iter().position(|&v| v <= 0.0) {
                    return Err(Error::Parse {
                        row: row + 1,
                        column: col.to_string(),
                        message: "weights must be positive".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn roles(&self) -> &Roles {
        &self.roles
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn clusters(&self) -> Option<&Clusters> {
        self.clusters.as_ref()
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Config(format!("column '{name}' not found")))
    }

    /// Same columns with different roles.
    pub fn with_roles(&self, roles: Roles) -> Result<Self> {
        Dataset::new(
            self.names.iter().cloned().zip(self.columns.iter().cloned()).collect(),
            roles,
        )
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let cols = self
            .names
            .iter()
            .cloned()
            .zip(self.columns.iter().map(|c| rows.iter().map(|&r| c[r]).collect()))
            .collect();
        Dataset::new(cols, self.roles.clone())
    }
}
