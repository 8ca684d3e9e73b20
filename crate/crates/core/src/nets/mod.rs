//! Fully-connected networks, flat parameter vectors and the
//! hypernetwork → main-network composition.

mod arch;
pub mod batched;
mod hyper;
pub mod io;
mod mlp;
mod params;

pub use arch::{Activation, ArchSpec, Layer};
pub use hyper::{HyperModel, Net, NetArch, Parameterization};
pub use io::ModelFile;
pub use mlp::{forward, forward_into, Workspace};
pub use params::{glorot_bound, init_params, InitMode, ParamVector, HYPER_OUTPUT_SCALE};

/// Parameter count of a dense network (free-function form of [`ArchSpec::param_count`]).
pub fn param_count(spec: &ArchSpec) -> usize {
    spec.param_count()
}
