#include "leosched/orbital/sgp4.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace leosched::orbital {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kDeg = kPi / 180.0;

// WGS-72
constexpr double kMu = 398600.8;
constexpr double kRadiusKm = 6378.135;
constexpr double kJ2 = 0.001082616;
constexpr double kJ3 = -0.00000253881;
constexpr double kJ4 = -0.00000165597;
constexpr double kJ3oJ2 = kJ3 / kJ2;
const double kXke = 60.0 / std::sqrt(kRadiusKm * kRadiusKm * kRadiusKm / kMu);
const double kVkmPerSec = kRadiusKm * kXke / 60.0;
constexpr double kX2o3 = 2.0 / 3.0;
constexpr double kTemp4 = 1.5e-12;

}  // namespace

double gmst(double jd_ut1) {
  const double tut1 = (jd_ut1 - 2451545.0) / 36525.0;
  double temp = -6.2e-6 * tut1 * tut1 * tut1 + 0.093104 * tut1 * tut1 +
                (876600.0 * 3600.0 + 8640184.812866) * tut1 + 67310.54841;
  temp = std::fmod(temp * kDeg / 240.0, kTwoPi);
  if (temp < 0.0) temp += kTwoPi;
  return temp;
}

Sgp4::Sgp4(const TleRecord& record) : norad_id_(record.norad_id), epoch_(record.epoch) {
  bstar_ = record.bstar;
  ecco_ = record.eccentricity;
  argpo_ = record.arg_perigee * kDeg;
  inclo_ = record.inclination * kDeg;
  mo_ = record.mean_anomaly * kDeg;
  nodeo_ = record.raan * kDeg;
  const double no_kozai = record.mean_motion * kTwoPi / 1440.0;

  // Recover the Brouwer mean motion from the Kozai value in the element set.
  const double eccsq = ecco_ * ecco_;
  const double omeosq = 1.0 - eccsq;
  const double rteosq = std::sqrt(omeosq);
  const double cosio = std::cos(inclo_);
  const double cosio2 = cosio * cosio;
  const double ak = std::pow(kXke / no_kozai, kX2o3);
  const double d1 = 0.75 * kJ2 * (3.0 * cosio2 - 1.0) / (rteosq * omeosq);
  double del = d1 / (ak * ak);
  const double adel = ak * (1.0 - del * del - del * (1.0 / 3.0 + 134.0 * del * del / 81.0));
  del = d1 / (adel * adel);
  no_ = no_kozai / (1.0 + del);

  const double ao = std::pow(kXke / no_, kX2o3);
  const double sinio = std::sin(inclo_);
  const double po = ao * omeosq;
  const double con42 = 1.0 - 5.0 * cosio2;
  con41_ = -con42 - cosio2 - cosio2;
  const double posq = po * po;
  const double rp = ao * (1.0 - ecco_);

  if (kTwoPi / no_ >= 225.0)
    throw PropagationError(PropagationError::Kind::kDeepSpace,
                           "satellite " + std::to_string(norad_id_) + ": period >= 225 min needs SDP4");
  if (omeosq < 0.0 || no_ < 0.0)
    throw PropagationError(PropagationError::Kind::kMeanMotion,
                           "satellite " + std::to_string(norad_id_) + ": invalid elements");

  const double ss = 78.0 / kRadiusKm + 1.0;
  const double qzms2t = std::pow((120.0 - 78.0) / kRadiusKm, 4.0);

  isimp_ = rp < (220.0 / kRadiusKm + 1.0);
  double sfour = ss;
  double qzms24 = qzms2t;
  const double perige = (rp - 1.0) * kRadiusKm;
  if (perige < 156.0) {
    sfour = perige - 78.0;
    if (perige < 98.0) sfour = 20.0;
    qzms24 = std::pow((120.0 - sfour) / kRadiusKm, 4.0);
    sfour = sfour / kRadiusKm + 1.0;
  }
  const double pinvsq = 1.0 / posq;
  const double tsi = 1.0 / (ao - sfour);
  eta_ = ao * ecco_ * tsi;
  const double etasq = eta_ * eta_;
  const double eeta = ecco_ * eta_;
  const double psisq = std::fabs(1.0 - etasq);
  const double coef = qzms24 * std::pow(tsi, 4.0);
  const double coef1 = coef / std::pow(psisq, 3.5);
  const double cc2 = coef1 * no_ *
                     (ao * (1.0 + 1.5 * etasq + eeta * (4.0 + etasq)) +
                      0.375 * kJ2 * tsi / psisq * con41_ * (8.0 + 3.0 * etasq * (8.0 + etasq)));
  cc1_ = bstar_ * cc2;
  double cc3 = 0.0;
  if (ecco_ > 1.0e-4) cc3 = -2.0 * coef * tsi * kJ3oJ2 * no_ * sinio / ecco_;
  x1mth2_ = 1.0 - cosio2;
  cc4_ = 2.0 * no_ * coef1 * ao * omeosq *
         (eta_ * (2.0 + 0.5 * etasq) + ecco_ * (0.5 + 2.0 * etasq) -
          kJ2 * tsi / (ao * psisq) *
              (-3.0 * con41_ * (1.0 - 2.0 * eeta + etasq * (1.5 - 0.5 * eeta)) +
               0.75 * x1mth2_ * (2.0 * etasq - eeta * (1.0 + etasq)) * std::cos(2.0 * argpo_)));
  cc5_ = 2.0 * coef1 * ao * omeosq * (1.0 + 2.75 * (etasq + eeta) + eeta * etasq);
  const double cosio4 = cosio2 * cosio2;
  const double temp1 = 1.5 * kJ2 * pinvsq * no_;
  const double temp2 = 0.5 * temp1 * kJ2 * pinvsq;
  const double temp3 = -0.46875 * kJ4 * pinvsq * pinvsq * no_;
  mdot_ = no_ + 0.5 * temp1 * rteosq * con41_ +
          0.0625 * temp2 * rteosq * (13.0 - 78.0 * cosio2 + 137.0 * cosio4);
  argpdot_ = -0.5 * temp1 * con42 + 0.0625 * temp2 * (7.0 - 114.0 * cosio2 + 395.0 * cosio4) +
             temp3 * (3.0 - 36.0 * cosio2 + 49.0 * cosio4);
  const double xhdot1 = -temp1 * cosio;
  nodedot_ = xhdot1 + (0.5 * temp2 * (4.0 - 19.0 * cosio2) + 2.0 * temp3 * (3.0 - 7.0 * cosio2)) * cosio;
  omgcof_ = bstar_ * cc3 * std::cos(argpo_);
  xmcof_ = 0.0;
  if (ecco_ > 1.0e-4) xmcof_ = -kX2o3 * coef * bstar_ / eeta;
  nodecf_ = 3.5 * omeosq * xhdot1 * cc1_;
  t2cof_ = 1.5 * cc1_;
  if (std::fabs(cosio + 1.0) > 1.5e-12)
    xlcof_ = -0.25 * kJ3oJ2 * sinio * (3.0 + 5.0 * cosio) / (1.0 + cosio);
  else
    xlcof_ = -0.25 * kJ3oJ2 * sinio * (3.0 + 5.0 * cosio) / kTemp4;
  aycof_ = -0.5 * kJ3oJ2 * sinio;
  delmo_ = std::pow(1.0 + eta_ * std::cos(mo_), 3.0);
  sinmao_ = std::sin(mo_);
  x7thm1_ = 7.0 * cosio2 - 1.0;

  if (!isimp_) {
    const double cc1sq = cc1_ * cc1_;
    d2_ = 4.0 * ao * tsi * cc1sq;
    const double temp = d2_ * tsi * cc1_ / 3.0;
    d3_ = (17.0 * ao + sfour) * temp;
    d4_ = 0.5 * temp * ao * tsi * (221.0 * ao + 31.0 * sfour) * cc1_;
    t3cof_ = d2_ + 2.0 * cc1sq;
    t4cof_ = 0.25 * (3.0 * d3_ + cc1_ * (12.0 * d2_ + 10.0 * cc1sq));
    t5cof_ = 0.2 * (3.0 * d4_ + 12.0 * cc1_ * d3_ + 6.0 * d2_ * d2_ + 15.0 * cc1sq * (2.0 * d2_ + cc1sq));
  }
}

SatelliteState Sgp4::propagate_minutes(double t) const {
  using K = PropagationError::Kind;
  const auto fail = [this](K kind, const char* what) {
    return PropagationError(kind, "satellite " + std::to_string(norad_id_) + ": " + what);
  };

  // Secular gravity and atmospheric drag.
  const double xmdf = mo_ + mdot_ * t;
  const double argpdf = argpo_ + argpdot_ * t;
  const double nodedf = nodeo_ + nodedot_ * t;
  double argpm = argpdf;
  double mm = xmdf;
  const double t2 = t * t;
  double nodem = nodedf + nodecf_ * t2;
  double tempa = 1.0 - cc1_ * t;
  double tempe = bstar_ * cc4_ * t;
  double templ = t2cof_ * t2;

  if (!isimp_) {
    const double delomg = omgcof_ * t;
    const double delmtemp = 1.0 + eta_ * std::cos(xmdf);
    const double delm = xmcof_ * (delmtemp * delmtemp * delmtemp - delmo_);
    const double temp = delomg + delm;
    mm = xmdf + temp;
    argpm = argpdf - temp;
    const double t3 = t2 * t;
    const double t4 = t3 * t;
    tempa = tempa - d2_ * t2 - d3_ * t3 - d4_ * t4;
    tempe = tempe + bstar_ * cc5_ * (std::sin(mm) - sinmao_);
    templ = templ + t3cof_ * t3 + t4 * (t4cof_ + t * t5cof_);
  }

  double nm = no_;
  double em = ecco_;
  const double inclm = inclo_;
  if (nm <= 0.0) throw fail(K::kMeanMotion, "mean motion is not positive");
  const double am = std::pow(kXke / nm, kX2o3) * tempa * tempa;
  nm = kXke / std::pow(am, 1.5);
  em = em - tempe;
  if (em >= 1.0 || em < -0.001) throw fail(K::kEccentricity, "eccentricity out of range (decayed orbit)");
  if (em < 1.0e-6) em = 1.0e-6;
  mm = mm + no_ * templ;
  double xlm = mm + argpm + nodem;

  nodem = std::fmod(nodem, kTwoPi);
  argpm = std::fmod(argpm, kTwoPi);
  xlm = std::fmod(xlm, kTwoPi);
  mm = std::fmod(xlm - argpm - nodem, kTwoPi);

  const double sinip = std::sin(inclm);
  const double cosip = std::cos(inclm);

  // Long-period periodics.
  const double axnl = em * std::cos(argpm);
  double temp = 1.0 / (am * (1.0 - em * em));
  const double aynl = em * std::sin(argpm) + temp * aycof_;
  const double xl = mm + argpm + nodem + temp * xlcof_ * axnl;

  // Kepler's equation.
  const double u = std::fmod(xl - nodem, kTwoPi);
  double eo1 = u;
  double tem5 = 9999.9;
  double sineo1 = 0.0, coseo1 = 0.0;
  for (int ktr = 1; std::fabs(tem5) >= 1.0e-12 && ktr <= 10; ++ktr) {
    sineo1 = std::sin(eo1);
    coseo1 = std::cos(eo1);
    tem5 = 1.0 - coseo1 * axnl - sineo1 * aynl;
    tem5 = (u - aynl * coseo1 + axnl * sineo1 - eo1) / tem5;
    if (std::fabs(tem5) >= 0.95) tem5 = tem5 > 0.0 ? 0.95 : -0.95;
    eo1 += tem5;
  }

  // Short-period periodics.
  const double ecose = axnl * coseo1 + aynl * sineo1;
  const double esine = axnl * sineo1 - aynl * coseo1;
  const double el2 = axnl * axnl + aynl * aynl;
  const double pl = am * (1.0 - el2);
  if (pl < 0.0) throw fail(K::kSemiLatusRectum, "semi-latus rectum is negative");

  const double rl = am * (1.0 - ecose);
  const double rdotl = std::sqrt(am) * esine / rl;
  const double rvdotl = std::sqrt(pl) / rl;
  const double betal = std::sqrt(1.0 - el2);
  temp = esine / (1.0 + betal);
  const double sinu = am / rl * (sineo1 - aynl - axnl * temp);
  const double cosu = am / rl * (coseo1 - axnl + aynl * temp);
  double su = std::atan2(sinu, cosu);
  const double sin2u = (cosu + cosu) * sinu;
  const double cos2u = 1.0 - 2.0 * sinu * sinu;
  temp = 1.0 / pl;
  const double temp1 = 0.5 * kJ2 * temp;
  const double temp2 = temp1 * temp;

  const double mrt = rl * (1.0 - 1.5 * temp2 * betal * con41_) + 0.5 * temp1 * x1mth2_ * cos2u;
  su = su - 0.25 * temp2 * x7thm1_ * sin2u;
  const double xnode = nodem + 1.5 * temp2 * cosip * sin2u;
  const double xinc = inclm + 1.5 * temp2 * cosip * sinip * cos2u;
  const double mvt = rdotl - nm * temp1 * x1mth2_ * sin2u / kXke;
  const double rvdot = rvdotl + nm * temp1 * (x1mth2_ * cos2u + 1.5 * con41_) / kXke;

  const double sinsu = std::sin(su), cossu = std::cos(su);
  const double snod = std::sin(xnode), cnod = std::cos(xnode);
  const double sini = std::sin(xinc), cosi = std::cos(xinc);
  const double xmx = -snod * cosi;
  const double xmy = cnod * cosi;
  const Vec3 uvec{xmx * sinsu + cnod * cossu, xmy * sinsu + snod * cossu, sini * sinsu};
  const Vec3 vvec{xmx * cossu - cnod * sinsu, xmy * cossu - snod * sinsu, sini * cossu};

  if (mrt < 1.0) throw fail(K::kDecayed, "orbit has decayed below the surface");

  SatelliteState s;
  s.norad_id = norad_id_;
  s.t = epoch_ + Micros(static_cast<std::int64_t>(std::llround(t * 60e6)));
  for (int i = 0; i < 3; ++i) {
    s.position[i] = mrt * uvec[i] * kRadiusKm;
    s.velocity[i] = (mvt * uvec[i] + rvdot * vvec[i]) * kVkmPerSec;
  }
  return s;
}

SatelliteState Sgp4::propagate(Timestamp t, double max_age_days) const {
  const double minutes = static_cast<double>((t - epoch_).count()) / 60e6;
  if (max_age_days >= 0.0 && std::fabs(minutes) > max_age_days * 1440.0)
    throw PropagationError(PropagationError::Kind::kStale,
                           "satellite " + std::to_string(norad_id_) + ": requested time is " +
                               std::to_string(minutes / 1440.0) + " days from the element epoch");
  SatelliteState s = propagate_minutes(minutes);
  s.t = t;
  return s;
}

SatelliteState propagate(const TleRecord& record, Timestamp t, double max_age_days) {
  return Sgp4(record).propagate(t, max_age_days);
}

}  // namespace leosched::orbital
