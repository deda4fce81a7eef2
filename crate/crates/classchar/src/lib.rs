pub mod chars;
pub mod element;
pub mod error;
pub mod field;
pub mod forms;
pub mod grp;
pub mod matspace;
pub mod products;
pub mod report;
pub mod roster;
pub mod verify;
pub mod walks;

pub use error::{Error, Result};
