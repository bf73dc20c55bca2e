pub mod cantor;
pub mod cocycle;
pub mod conjugacy;
pub mod diophantine;
pub mod harness;
pub mod numerics;
