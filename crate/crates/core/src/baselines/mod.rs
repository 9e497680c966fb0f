//! Reference receivers: ideal heterodyne detection with angular-sector
//! decisions (the standard quantum limit) and the Helstrom bound for
//! equiprobable PSK states.

mod helstrom;
mod heterodyne;
pub mod quadrature;

pub use helstrom::{gram_eigenvalues, helstrom_error_psk};
pub use heterodyne::{heterodyne_channel_matrix, heterodyne_sector_density, HeterodyneSpec};
