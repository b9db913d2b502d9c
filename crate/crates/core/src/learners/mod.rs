//! Base learners: CART-style decision tree, bootstrap random forest and
//! multinomial logistic regression.

pub mod forest;
pub mod logistic;
pub mod tree;
pub mod vote;
