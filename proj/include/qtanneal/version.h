#ifndef QTANNEAL_VERSION_H_
#define QTANNEAL_VERSION_H_

namespace qtanneal {

inline constexpr char kVersion[] = "0.1.0";

}  // namespace qtanneal

#endif  // QTANNEAL_VERSION_H_
