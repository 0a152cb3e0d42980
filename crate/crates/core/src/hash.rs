use std::hash::{BuildHasherDefault, Hasher};

/// Murmur3 64-bit finaliser.
#[inline]
pub fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^= k >> 33;
    k
}

/// Hasher for integer keys that applies [`fmix64`] on `finish`.
#[derive(Debug, Default, Clone, Copy)]
pub struct MurmurFinalizer {
    state: u64,
}

impl Hasher for MurmurFinalizer {
    #[inline]
    fn finish(&self) -> u64 {
        fmix64(self.state)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state = self.state.rotate_left(8) ^ b as u64;
        }
    }

    #[inline]
    fn write_u32(&mut self, i: u32) {
        self.state = i as u64;
    }

    #[inline]
    fn write_u64(&mut self, i: u64) {
        self.state = i;
    }
}

pub type MurmurBuildHasher = BuildHasherDefault<MurmurFinalizer>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_vectors() {
        assert_eq!(fmix64(0), 0);
        // Reference values from the canonical MurmurHash3 fmix64.
        assert_eq!(fmix64(1), 0xb456_bcfc_34c2_cb2c);
        assert_eq!(fmix64(u64::MAX), 0x64b5_720b_4b82_5f21);
    }
}
