pub mod checkpoint;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod landmark;
pub mod metrics;
pub mod modularity;
pub mod noise;
pub mod sparse;
pub mod synthetic;
pub mod train;

pub use error::{AssignError, EmbedError, GraphError, MetricError, StructError, TrainError};
pub use graph::Graph;
