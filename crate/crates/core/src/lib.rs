//! Leavitt path algebras realised as Steinberg algebras of graph groupoids.
//!
//! Elements are finite combinations of indicator functions of basic compact
//! open bisections `Z((μ,ν) ∖ F)`. On top of that symbolic core sit the
//! Leavitt generators and relations, graph collapse, and an executable
//! Morita context between a collapsed graph and the original.

pub mod collapse;
pub mod cylinder;
pub mod graph;
pub mod leavitt;
pub mod morita;
pub mod report;
pub mod ring;
pub mod sample;
pub mod steinberg;

use thiserror::Error;

/// Any error surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Cylinder(#[from] cylinder::CylinderError),
    #[error(transparent)]
    Algebra(#[from] steinberg::AlgebraError),
    #[error(transparent)]
    Word(#[from] leavitt::WordError),
    #[error(transparent)]
    Collapse(#[from] collapse::CollapseError),
    #[error(transparent)]
    Morita(#[from] morita::MoritaError),
}
