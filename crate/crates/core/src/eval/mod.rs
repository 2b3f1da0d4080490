//! Kernel SVM training and cross-validated evaluation on precomputed Gram
//! matrices.

pub mod cv;
pub mod svm;

pub use cv::{cross_validate, Candidate, CvConfig, CvError, CvReport, KernelChoice, Selection};
pub use svm::{svm_train, BinarySvm, OneVsOne, SvmError};
