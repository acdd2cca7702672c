const fs = require('fs');

module.exports = function copyAsset({ from, to, mode }) {
  fs.copyFileSync(from, to);
  return mode;
};

// expect: ParamProperty from 3 copyAsset PathTrav 4
// expect: ParamProperty to 3 copyAsset PathTrav 4
// expect: ParamProperty mode 3 copyAsset None -
