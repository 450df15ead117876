pub mod syntax;
pub mod typesys;
pub mod qcore;
pub mod interp;
