//! Gauge normalization and injectivity of MPS tensors.

use qprim::generators::{aklt_tensor, ghz_tensor, random_tensor};
use qprim::mps::{gamma_rank, injectivity_length_report, kernel_dim, normalize_tensor, MpsTensor};
use qprim::TolerancePolicy;

fn show(name: &str, t: &MpsTensor, pol: &TolerancePolicy) -> qprim::Result<()> {
    let inj = injectivity_length_report(t, pol)?;
    let ranks = (1..=3).map(|l| gamma_rank(t, l, pol)).collect::<qprim::Result<Vec<_>>>()?;
    println!(
        "{name}: d={} D={}  injective from L={:?}  rank Gamma_L (L=1..3) {:?}  kernel at L=2: {}",
        t.phys_d(),
        t.bond_dim(),
        inj.length,
        ranks,
        kernel_dim(t, 2, pol)?
    );
    Ok(())
}

fn main() -> qprim::Result<()> {
    let pol = TolerancePolicy::default();
    let aklt = aklt_tensor();
    let (b, ch) = normalize_tensor(&aklt, &pol)?;
    println!("aklt normalized: tp deviation {:E}, B_x[0][1] = {}", ch.tp_deviation(), b.matrices()[0].get(0, 1));
    show("aklt", &aklt, &pol)?;
    show("ghz", &ghz_tensor(2)?, &pol)?;
    show("random", &random_tensor(2, 3, 5)?, &pol)?;
    Ok(())
}
