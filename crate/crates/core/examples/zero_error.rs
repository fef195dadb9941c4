//! Spectral classification and the zero-error verdict of a few channels.

use qprim::generators::{amplitude_damping, cyclic_shift_unitary, depolarizing, pauli_channel};
use qprim::spectral::{classify_primitivity, spectral_report, zero_error_classify};
use qprim::{KrausChannel, TolerancePolicy};

fn main() -> qprim::Result<()> {
    let pol = TolerancePolicy::default();
    let chans: Vec<(&str, KrausChannel)> = vec![
        ("pauli", pauli_channel()),
        ("depolarizing(2, 1)", depolarizing(2, 1.0)?),
        ("cyclic shift D=3", cyclic_shift_unitary(3)?),
        ("amplitude damping 0.5", amplitude_damping(0.5)?),
    ];
    for (name, ch) in &chans {
        let rep = spectral_report(ch, &pol)?;
        let v = zero_error_classify(ch, &pol)?;
        println!("{name}");
        println!(
            "  peripheral {}  period {}  fixed points {}",
            rep.peripheral.len(),
            rep.period,
            rep.fixed_point_multiplicity
        );
        println!("  {:?}", classify_primitivity(ch, &pol)?);
        println!("  {:?} ({:?}) threshold {:?}", v.case, v.reason, v.n_threshold);
    }
    Ok(())
}
