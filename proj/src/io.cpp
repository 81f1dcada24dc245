#include <iomanip>
#include <ostream>

#include "fmb/trajectory.hpp"

namespace fmb {

void write_trajectory(std::ostream& os, const Trajectory& traj) {
  const bool bath = traj.bath_energy.size() == traj.size();
  os << "t[time] re_a[amplitude] im_a[amplitude] abs_a[amplitude]";
  if (bath)
    os << " bath_norm[amplitude^2] invariant[amplitude^2]";
  os << '\n' << std::setprecision(12);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.t[k] << ' ' << traj.a[k].real() << ' ' << traj.a[k].imag() << ' '
       << std::abs(traj.a[k]);
    if (bath)
      os << ' ' << traj.bath_energy[k] << ' ' << traj.invariant[k];
    os << '\n';
  }
}

void write_ensemble(std::ostream& os, const EnsembleStats& st) {
  os << "t[time] re_mean_a[amplitude] im_mean_a[amplitude] mean_abs2[amplitude^2] "
        "stderr_abs2[amplitude^2] stderr_mean[amplitude]\n";
  os << std::setprecision(12);
  for (std::size_t k = 0; k < st.t.size(); ++k)
    os << st.t[k] << ' ' << st.mean_a[k].real() << ' ' << st.mean_a[k].imag() << ' '
       << st.second_moment[k] << ' ' << st.stderr_second[k] << ' ' << st.stderr_mean[k] << '\n';
}

void write_spectrum(std::ostream& os, const SpectralDensity& s, const char* value_label) {
  os << "omega[1/time] " << value_label << '\n' << std::setprecision(15);
  for (std::size_t k = 0; k < s.size(); ++k)
    os << s.omega[k] << ' ' << s.value[k] << '\n';
}

} // namespace fmb
