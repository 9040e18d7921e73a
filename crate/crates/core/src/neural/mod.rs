//! Small dense and recurrent networks with hand-written backpropagation.

mod gradcheck;
mod loss;
mod net;
mod optim;
mod params;
mod train;

pub use gradcheck::{gradient_check, GradCheck, STEP as GRADCHECK_STEP};
pub use loss::{bce, loss_and_grad, weighted_bce, LossConfig, EPS};
pub use net::{Architecture, Cell, NetSpec};
pub use optim::{Nesterov, OptimizerConfig};
pub use params::Params;
pub use train::{train, NetProfile, TrainedNet};
