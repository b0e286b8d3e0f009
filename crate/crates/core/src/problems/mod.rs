//! Concrete systems: the Brown almost linear function, affine systems, and
//! the logistic-regression root-finding reformulation built from a
//! [`Dataset`].

mod brown;
mod dataset;
mod glm;
mod linear;

pub use brown::BrownProblem;
pub use dataset::{parse_libsvm, parse_libsvm_file, synthetic_dataset, Dataset};
pub use glm::{logistic_first_derivative, logistic_second_derivative, make_glm, GlmProblem};
pub use linear::{make_linear, LinearProblem};
