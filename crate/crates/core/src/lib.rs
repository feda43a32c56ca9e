pub mod cli;
pub mod field;
pub mod linalg;
pub mod odag;
pub mod lp;
pub mod qe;
pub mod rational;
pub mod riesz;
pub mod semantics;
pub mod syntax;
pub mod typespace;
pub mod ultramean;
