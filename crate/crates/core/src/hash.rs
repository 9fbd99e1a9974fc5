//! Stable 64-bit hashing used for per-item seeding and split assignment.
//!
//! Every seed in the toolkit is derived from
//! `fmix64(fnv1a64(master_seed_le || item_id_utf8))` so results never depend on
//! processing order or worker count. The murmur3 finalizer spreads FNV's poorly
//! mixed high bits; sequential ids like `chunk_00001` otherwise bias `h / 2^64`.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over a byte slice.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// murmur3 64-bit finalizer.
pub fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

/// Hash of the little-endian bytes of `master_seed` followed by the UTF-8
/// bytes of `item_id`.
pub fn item_hash(master_seed: u64, item_id: &str) -> u64 {
    let mut buf = Vec::with_capacity(8 + item_id.len());
    buf.extend_from_slice(&master_seed.to_le_bytes());
    buf.extend_from_slice(item_id.as_bytes());
    fmix64(fnv1a64(&buf))
}

/// Maps a hash onto `[0, 1)` as `h / 2^64`.
pub fn unit_interval(h: u64) -> f64 {
    h as f64 / 18_446_744_073_709_551_616.0
}
