//! Cyclic label propagation for graph semi-supervised learning.
//!
//! Two modules reinforce each other in a closed loop: a neighborhood-aggregating
//! node encoder trained with structure- and label-aware negative sampling, and an
//! embedding-adaptive label-propagation optimizer that runs proximal-gradient
//! updates of per-node label distributions under simplex constraints. Edge
//! weights for propagation are recomputed from fresh embeddings every outer
//! iteration; reliably labeled nodes (low-entropy rows, self-paced threshold)
//! feed back into the encoder as label context.
//!
//! The crate also ships classic label-propagation baselines (harmonic / GFHF and
//! LLGC), dataset ingestion for simple text formats, an evaluation harness with
//! micro/macro F1, and a thin CLI (`cycprop`). See the `examples/` directory for
//! one runnable example per capability.

pub mod baselines;
pub mod config;
pub mod encoder;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod propagation;
pub mod sampler;
pub mod synth;
pub mod trainer;

pub mod cli;

pub use config::{DeltaMode, Hyperparams, Variant};
pub use encoder::{EmbeddingMatrix, EncoderParams};
pub use graph::{Graph, NoiseDistribution, RandomSource};
pub use ingest::{AttributeMatrix, LabelSplit};
pub use propagation::{IndicatorVector, LabelDistribution, WeightedGraph};
pub use trainer::{TrainResult, TrainState};
