/// The splitmix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one run in a batch:
/// `splitmix64(base ^ splitmix64(axis_value.to_bits() ^ splitmix64(replica)))`.
pub fn derive_seed(base: u64, axis_value: f64, replica: u64) -> u64 {
    splitmix64(base ^ splitmix64(axis_value.to_bits() ^ splitmix64(replica)))
}
