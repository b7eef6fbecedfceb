pub mod antisym;
pub mod chaos;
pub mod error;
pub mod grid;
pub mod ito;
pub mod malliavin;
pub mod par;
pub mod random;
pub mod slots;
pub mod oracle;
pub mod applications;
pub mod report;
pub mod io;
pub mod suite;
