//! Scan-to-map alignment: k-d tree, voxel reduction, closed-form rigid fit and ICP.

mod icp;
pub mod kdtree;
mod rigid;
mod voxel;

pub use icp::{icp_align, merge_maps, IcpConfig, IcpResult};
pub use kdtree::{nearest_neighbor, KdTree, KdTree2, KdTree3};
pub use rigid::estimate_rigid_transform;
pub use voxel::{reduce_labeled, reduce_points};
