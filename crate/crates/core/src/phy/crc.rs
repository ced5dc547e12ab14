//! IEEE 802.3 / 802.11 frame check sequence.

const POLY_REFLECTED: u32 = 0xEDB8_8320;

const TABLE: [u32; 256] = build_table();

const fn build_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u32;
        let mut k = 0;
        while k < 8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ POLY_REFLECTED } else { crc >> 1 };
            k += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

/// Reflected CRC-32, initial value and final XOR all ones.
pub fn fcs_crc32(bytes: &[u8]) -> u32 {
    !bytes.iter().fold(!0u32, |crc, &b| {
        (crc >> 8) ^ TABLE[((crc ^ b as u32) & 0xFF) as usize]
    })
}

/// Appends the FCS, least significant byte first.
pub fn append_fcs(payload: &[u8]) -> alloc::vec::Vec<u8> {
    let mut out = alloc::vec::Vec::with_capacity(payload.len() + 4);
    out.extend_from_slice(payload);
    out.extend_from_slice(&fcs_crc32(payload).to_le_bytes());
    out
}

/// True when the trailing four bytes are the FCS of the rest.
pub fn check_fcs(psdu: &[u8]) -> bool {
    if psdu.len() < 4 {
        return false;
    }
    let (body, fcs) = psdu.split_at(psdu.len() - 4);
    fcs_crc32(body).to_le_bytes() == fcs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fcs_round_trip() {
        let framed = append_fcs(b"hello wov");
        assert!(check_fcs(&framed));
        let mut bad = framed.clone();
        bad[3] ^= 0x10;
        assert!(!check_fcs(&bad));
        assert!(!check_fcs(&[1, 2, 3]));
    }
}
