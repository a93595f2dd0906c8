#include "gbs/matfuncs.hpp"

// Matrix functions are header templates; this translation unit pins a few
// common instantiations so client code links against prebuilt copies.
namespace gbs {

template double hafnian(const Eigen::MatrixBase<Matrix>&);
template Complex hafnian(const Eigen::MatrixBase<CMatrix>&);
template double hafnian_enum(const Eigen::MatrixBase<Matrix>&);
template Complex hafnian_enum(const Eigen::MatrixBase<CMatrix>&);
template double loop_hafnian(const Eigen::MatrixBase<Matrix>&);
template Complex loop_hafnian(const Eigen::MatrixBase<CMatrix>&);
template double permanent(const Eigen::MatrixBase<Matrix>&);
template Complex permanent(const Eigen::MatrixBase<CMatrix>&);
template double torontonian(const Eigen::MatrixBase<Matrix>&);
template double torontonian(const Eigen::MatrixBase<CMatrix>&);

}  // namespace gbs
