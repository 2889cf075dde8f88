use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{FreeWord, LatticePoint, SpaceHandle};
use crate::cone::{parse_rational, BaseGraph, ConeGrid, ConeSpace, LambdaFunction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Lattice,
    NaturalLattice,
    FreeGroup,
    BinaryTree,
    Cone,
}

/// Key–value description of a space, as found in an experiment config.
///
/// ```toml
/// [space]
/// model = "lattice"        # lattice | natural-lattice | free-group | binary-tree | cone
/// rank = 2
/// generators = ["(1,0)", "(1,1)"]   # optional; words like "ab" for free-group
/// ```
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescriptor {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeDescriptor>,
}

/// Base graph, λ and height grid for the cone model.
///
/// The base graph comes from exactly one of `edges` (inline edge list),
/// `edges_file` (path, relative to the config file) or `cycle` (an n-cycle
/// with `edge_length`, default 1).
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_length: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_octave: Option<u32>,
    /// Heights added to the geometric grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<f64>>,
}

impl ConeDescriptor {
    pub fn base_graph(&self, base_dir: Option<&Path>) -> Result<BaseGraph> {
        let sources = [self.edges.is_some(), self.edges_file.is_some(), self.cycle.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(Error::config(
                "space.cone",
                "give exactly one of `edges`, `edges_file` or `cycle`",
            ));
        }
        if let Some(text) = &self.edges {
            return BaseGraph::parse_edge_list(text);
        }
        if let Some(path) = &self.edges_file {
            let path = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            return BaseGraph::parse_edge_list(&text);
        }
        let n = self.cycle.unwrap_or_default();
        let len = match &self.edge_length {
            Some(s) => parse_rational(s).map_err(|e| Error::config("space.cone.edge_length", e))?,
            None => 1.0,
        };
        BaseGraph::cycle(n, len)
    }

    pub fn lambda(&self) -> Result<LambdaFunction> {
        match &self.lambda {
            Some(s) => s.parse(),
            None => Ok(LambdaFunction::Linear),
        }
    }

    pub fn build(&self, base_dir: Option<&Path>) -> Result<ConeSpace> {
        let base = self.base_graph(base_dir)?;
        let grid = ConeGrid::geometric(base, self.t_max.unwrap_or(64.0), self.per_octave.unwrap_or(4))?
            .with_extra_heights(self.heights.clone().unwrap_or_default())?;
        Ok(ConeSpace::new(grid, self.lambda()?))
    }
}

impl SpaceDescriptor {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("space", e.to_string()))
    }

    /// Builds the handle; relative file references resolve against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<SpaceHandle> {
        let rank = || {
            self.rank
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::config("space.rank", "lattice models need rank >= 1"))
        };
        let handle = match self.model {
            ModelKind::Lattice | ModelKind::NaturalLattice => {
                let natural = self.model == ModelKind::NaturalLattice;
                let k = rank()?;
                match &self.generators {
                    None => {
                        if natural {
                            SpaceHandle::natural_lattice(k)
                        } else {
                            SpaceHandle::integer_lattice(k)
                        }
                    }
                    Some(gens) => {
                        let gens = gens
                            .iter()
                            .map(|g| g.parse::<LatticePoint>())
                            .collect::<Result<Vec<_>>>()?;
                        SpaceHandle::lattice_with_generators(k, natural, gens)?
                    }
                }
            }
            ModelKind::FreeGroup => match &self.generators {
                None => SpaceHandle::free_group(),
                Some(gens) => {
                    let gens = gens
                        .iter()
                        .map(|g| g.parse::<FreeWord>())
                        .collect::<Result<Vec<_>>>()?;
                    SpaceHandle::free_group_with_generators(gens)?
                }
            },
            ModelKind::BinaryTree => SpaceHandle::binary_tree(),
            ModelKind::Cone => {
                let cone = self
                    .cone
                    .as_ref()
                    .ok_or_else(|| Error::config("space.cone", "the cone model needs a [space.cone] table"))?;
                SpaceHandle::cone(cone.build(base_dir)?)
            }
        };
        let handle = match self.cap {
            Some(cap) => handle.with_cap(cap),
            None => handle,
        };
        match &self.basepoint {
            Some(b) => {
                let p = handle.parse_point(b)?;
                handle.with_basepoint(p)
            }
            None => Ok(handle),
        }
    }
}
