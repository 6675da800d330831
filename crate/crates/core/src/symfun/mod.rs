pub mod character;
pub mod functions;
pub mod partition;

pub use character::character;
pub use functions::*;
pub use partition::{partitions_of, partitions_up_to, Partition};
