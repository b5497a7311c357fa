//! Anti-de Sitter layer: holonomy pairs with particles, reconstruction from
//! bending data, and the local formulas for surfaces in AdS space.

pub mod curvature;
pub mod embedding;
pub mod jacobi;
pub mod ghmc;
pub mod recovery;

pub use ghmc::{
    decompose_rotation_pair, diagram_check, from_bending, left_right_metrics, pure_rotation_pair, BendData,
    DiagramReport, GhmcData,
};
pub use recovery::holonomy_to_fn;
pub use embedding::{flow_curvature_check, mu_from_embedding, normal_flow_metric, EmbeddingSample, MetricSample};
pub use jacobi::{jacobi_check, JacobiReport};
