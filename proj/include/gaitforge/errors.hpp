#pragma once

#include <stdexcept>
#include <string>

namespace gaitforge {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define GAITFORGE_ERROR(Name)                                                                      \
  class Name : public Error                                                                        \
  {                                                                                                \
  public:                                                                                          \
    using Error::Error;                                                                            \
  }

GAITFORGE_ERROR(InvalidParameters);
GAITFORGE_ERROR(SingularResistance);
GAITFORGE_ERROR(SingularInertia);
GAITFORGE_ERROR(IntegrationFailure);
GAITFORGE_ERROR(InvalidGait);
GAITFORGE_ERROR(NonSimpleRegion);
GAITFORGE_ERROR(JunctionBearing);
GAITFORGE_ERROR(NoRoot);
GAITFORGE_ERROR(NoBracket);
GAITFORGE_ERROR(BoundNeverReached);
GAITFORGE_ERROR(ConfigError);

#undef GAITFORGE_ERROR

/// The singular-arc tangent is undefined (A^2 + B^2 vanishes); carries the arc's last point.
class SingularArcBreakdown : public Error
{
public:
  SingularArcBreakdown(const std::string & what, double phi1, double phi2, double t)
      : Error(what), phi1_(phi1), phi2_(phi2), t_(t)
  {}

  double phi1() const { return phi1_; }
  double phi2() const { return phi2_; }
  double time() const { return t_; }

private:
  double phi1_, phi2_, t_;
};

}  // namespace gaitforge
