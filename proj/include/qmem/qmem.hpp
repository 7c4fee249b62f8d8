#ifndef QMEM_QMEM_HPP
#define QMEM_QMEM_HPP

#include <qmem/numcore/bessel.hpp>
#include <qmem/numcore/distribution.hpp>
#include <qmem/numcore/efficiency.hpp>
#include <qmem/numcore/error.hpp>
#include <qmem/numcore/fourier.hpp>
#include <qmem/numcore/grid.hpp>
#include <qmem/numcore/march.hpp>
#include <qmem/numcore/pulse.hpp>
#include <qmem/numcore/sequence.hpp>
#include <qmem/numcore/transfer.hpp>
#include <qmem/twolevel/config.hpp>
#include <qmem/twolevel/solver.hpp>
#include <qmem/echo/analytic.hpp>
#include <qmem/echo/protocols.hpp>
#include <qmem/threelevel/control.hpp>
#include <qmem/threelevel/solver.hpp>
#include <qmem/threelevel/susceptibility.hpp>
#include <qmem/slowlight/protocols.hpp>
#include <qmem/certify/chain.hpp>
#include <qmem/certify/counting.hpp>

#endif
