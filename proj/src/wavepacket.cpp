#include "raman/wavepacket.hpp"

#include <cmath>

namespace raman {

Wavepacket::Wavepacket(ComplexEnvelope env, double n_photon)
    : envelope(std::move(env)), mean_photon_number(n_photon) {
    if (n_photon < 0.0)
        throw std::invalid_argument("Wavepacket: negative photon number");
    envelope.check_finite("Wavepacket envelope");
    const double n2 = trapz_abs2(envelope);
    if (n_photon == 0.0 && n2 == 0.0) return;  // vacuum packet
    if (std::abs(n2 - 1.0) > norm_tol)
        throw std::invalid_argument("Wavepacket: envelope norm^2 = " + std::to_string(n2) +
                                    ", expected 1 within " + std::to_string(norm_tol));
}

Wavepacket Wavepacket::from_raw(const ComplexEnvelope& raw) {
    raw.check_finite("Wavepacket raw envelope");
    const double n = trapz_abs2(raw);
    Wavepacket wp;
    wp.envelope = raw;
    wp.mean_photon_number = n;
    if (n > 0.0) {
        const double s = 1.0 / std::sqrt(n);
        for (cd& x : wp.envelope.v) x *= s;
    }
    return wp;
}

cd Wavepacket::amplitude(int i) const {
    return std::sqrt(mean_photon_number) * envelope[i];
}

cd wavepacket_inner(const Wavepacket& a, const Wavepacket& b) {
    require_same_grid(a.envelope.grid, b.envelope.grid, "wavepacket_inner");
    return trapz_inner(a.envelope, b.envelope);
}

}  // namespace raman
