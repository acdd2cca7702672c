const fs = require('fs');

function readAll(dir, done) {
  fs.readdir(dir, (err, names) => {
    if (err) return done(err);
    names.forEach((entry) => {
      fs.readFile(dir + '/' + entry, done);
    });
  });
}

module.exports = readAll;

// expect: ApiParam dir 3 readAll PathTrav 4
// expect: ApiParam done 3 readAll None -
